#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pvq/error.hpp"
#include "pvq/image.hpp"
#include "pvq/vq.hpp"

namespace testutil {

// Runs f and reports the ErrorKind it threw, or nullopt if it did not throw.
template <typename F>
std::optional<pvq::ErrorKind> thrown_kind(F&& f) {
    try {
        std::forward<F>(f)();
    } catch (const pvq::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

inline pvq::GrayImage random_image(std::mt19937& rng, int width, int height) {
    pvq::GrayImage img;
    img.width = width;
    img.height = height;
    img.samples.resize(img.pixel_count());
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

inline pvq::TrainingSet make_training_set(pvq::BlockGeometry g,
                                          const std::vector<std::vector<double>>& vectors) {
    pvq::TrainingSet ts;
    ts.geometry = g;
    ts.count = vectors.size();
    ts.blocks_per_row = static_cast<int>(vectors.size());
    for (const auto& v : vectors) ts.values.insert(ts.values.end(), v.begin(), v.end());
    return ts;
}

inline pvq::Codebook make_codebook(pvq::BlockGeometry g,
                                   const std::vector<std::vector<double>>& codewords) {
    pvq::Codebook cb;
    cb.geometry = g;
    for (const auto& v : codewords) cb.values.insert(cb.values.end(), v.begin(), v.end());
    return cb;
}

// Scratch directory that cleans up after itself.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               (tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string slurp_text(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testutil
