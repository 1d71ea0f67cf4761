#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pvq/error.hpp"

namespace pvq {

/// 8-bit grayscale raster, samples stored row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples; // width * height entries

    std::uint8_t at(int row, int col) const {
        return samples[static_cast<std::size_t>(row) * width + col];
    }
    std::uint8_t& at(int row, int col) {
        return samples[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }

    bool operator==(const GrayImage&) const = default;
};

namespace detail {

inline bool is_pgm_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// Skips whitespace and '#' comment lines between header tokens.
inline void skip_pgm_separators(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (is_pgm_space(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
}

inline long read_pgm_int(std::span<const std::uint8_t> bytes, std::size_t& pos,
                         const char* what) {
    skip_pgm_separators(bytes, pos);
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9')
        fail(ErrorKind::Format, std::string("PGM header: expected ") + what);
    long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1'000'000'000L)
            fail(ErrorKind::Format, std::string("PGM header: ") + what + " out of range");
        ++pos;
    }
    return value;
}

} // namespace detail

/// Parses a binary PGM (magic "P5", maxval <= 255). Header may contain
/// comment lines; exactly one whitespace byte separates maxval from the
/// raw samples.
inline GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        fail(ErrorKind::Format, "PGM: bad magic, expected P5");
    std::size_t pos = 2;

    const long width  = detail::read_pgm_int(bytes, pos, "width");
    const long height = detail::read_pgm_int(bytes, pos, "height");
    const long maxval = detail::read_pgm_int(bytes, pos, "maxval");
    if (width < 1 || height < 1)
        fail(ErrorKind::Format, "PGM: non-positive dimensions");
    if (maxval > 255)
        fail(ErrorKind::UnsupportedDepth,
             "PGM: maxval " + std::to_string(maxval) + " exceeds 8-bit range");
    if (maxval < 1)
        fail(ErrorKind::Format, "PGM: maxval must be positive");

    if (pos >= bytes.size() || !detail::is_pgm_space(bytes[pos]))
        fail(ErrorKind::Format, "PGM: missing whitespace after maxval");
    ++pos;

    const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < need)
        fail(ErrorKind::Truncation,
             "PGM: sample data truncated, need " + std::to_string(need) + " bytes, have " +
                 std::to_string(bytes.size() - pos));

    GrayImage img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.samples.assign(bytes.begin() + pos, bytes.begin() + pos + need);
    return img;
}

/// Emits binary PGM with maxval 255. load_pgm(save_pgm(x)) == x.
inline std::vector<std::uint8_t> save_pgm(const GrayImage& image) {
    std::string header = "P5\n" + std::to_string(image.width) + " " +
                         std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out;
    out.reserve(header.size() + image.samples.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), image.samples.begin(), image.samples.end());
    return out;
}

inline GrayImage load_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_pgm(bytes);
}

inline void save_pgm_file(const GrayImage& image, const std::string& path) {
    auto bytes = save_pgm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

enum class SynthKind { Gradient, Checker, Noise };

/// Deterministic synthetic test images: horizontal gradient, 8x8-cell
/// checkerboard, or seeded uniform noise.
inline GrayImage synth_image(SynthKind kind, int width, int height, int seed = 0) {
    if (width < 1 || height < 1)
        fail(ErrorKind::Config, "synth_image: dimensions must be >= 1");

    GrayImage img;
    img.width = width;
    img.height = height;
    img.samples.resize(img.pixel_count());

    switch (kind) {
    case SynthKind::Gradient: {
        if (width < 2)
            fail(ErrorKind::DegenerateInput, "gradient needs width >= 2");
        for (int c = 0; c < width; ++c) {
            auto v = static_cast<std::uint8_t>((255L * c) / (width - 1));
            for (int r = 0; r < height; ++r) img.at(r, c) = v;
        }
        break;
    }
    case SynthKind::Checker:
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                img.at(r, c) = ((r / 8 + c / 8) % 2 == 0) ? 0 : 255;
        break;
    case SynthKind::Noise: {
        std::mt19937 rng(static_cast<std::uint32_t>(seed));
        for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng() & 0xFF);
        break;
    }
    }
    return img;
}

} // namespace pvq
