#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pvq/codec.hpp"
#include "pvq/error.hpp"
#include "pvq/image.hpp"
#include "pvq/metrics.hpp"
#include "pvq/vq.hpp"

namespace pvq {

enum class InitMethod { Conventional, Modified };

inline const char* method_name(InitMethod m) {
    return m == InitMethod::Conventional ? "conventional" : "modified";
}

/// One benchmark campaign: a list of (codebook size, block geometry)
/// cells, trained with both initializers on every image.
struct BenchConfig {
    std::vector<std::pair<int, BlockGeometry>> configs;
    double epsilon = 0.001;
    std::vector<std::uint32_t> seeds; // one conventional run per seed
    int max_iters = 100;
    bool measure_time = true;

    // The eight (N, block) cells the reference tables use.
    static BenchConfig paper_defaults(int seed_count = 10) {
        BenchConfig cfg;
        cfg.configs = {{128, {4, 8}}, {128, {8, 4}},  {256, {4, 4}}, {256, {8, 8}},
                       {512, {4, 8}}, {512, {8, 4}}, {1024, {4, 4}}, {1024, {8, 8}}};
        for (int s = 0; s < seed_count; ++s) cfg.seeds.push_back(static_cast<std::uint32_t>(s));
        return cfg;
    }
};

struct BenchRow {
    std::string image;
    int codebook_size = 0;
    BlockGeometry geometry;
    InitMethod method = InitMethod::Conventional;
    std::optional<std::uint32_t> seed; // empty for the pyramid initializer
    int iterations = 0;
    double psnr_db = 0.0;
    double seconds = 0.0;
    int repairs = 0;
    std::string error; // empty on success
};

struct NamedImage {
    std::string name;
    GrayImage image;
};

/// Trains one cell, encodes and decodes the image through the serialized
/// format, and measures PSNR against the original. Errors propagate with
/// the cell configuration attached.
inline BenchRow run_config(const GrayImage& image, const std::string& name, int codebook_size,
                           BlockGeometry geometry, InitMethod method,
                           std::optional<std::uint32_t> seed, double epsilon = 0.001,
                           int max_iters = 100, bool measure_time = true) {
    BenchRow row;
    row.image = name;
    row.codebook_size = codebook_size;
    row.geometry = geometry;
    row.method = method;
    row.seed = seed;

    std::string context = name + " N=" + std::to_string(codebook_size) + " block=" +
                          std::to_string(geometry.block_w) + "x" +
                          std::to_string(geometry.block_h) + " " + method_name(method);
    if (seed) context += " seed=" + std::to_string(*seed);

    try {
        const auto t0 = std::chrono::steady_clock::now();

        TrainingSet ts = tile_image(image, geometry);
        Codebook initial =
            method == InitMethod::Conventional
                ? init_random(ts, static_cast<std::size_t>(codebook_size), seed.value_or(0))
                : init_pyramid(image, geometry, static_cast<std::size_t>(codebook_size));
        auto [trained, report] = lbg_train(ts, initial, epsilon, max_iters);

        CompressedImage compressed = encode(image, trained);
        GrayImage decoded = decode(deserialize(serialize(compressed)));

        row.iterations = report.iterations;
        row.repairs = report.empty_cell_repairs;
        row.psnr_db = psnr(image, decoded).psnr_db;
        if (measure_time) {
            const auto t1 = std::chrono::steady_clock::now();
            row.seconds = std::chrono::duration<double>(t1 - t0).count();
        }
    } catch (const Error& e) {
        fail(e.kind(), context + ": " + e.what());
    }
    return row;
}

/// Runs every (image x config x method x seed) cell. Per-cell failures
/// become rows with the error column set; the run continues. Row order is
/// deterministic: image, then config, conventional seeds, then modified.
inline std::vector<BenchRow> run_matrix(const std::vector<NamedImage>& images,
                                        const BenchConfig& cfg) {
    if (images.empty()) fail(ErrorKind::Config, "run_matrix: no images");
    if (cfg.seeds.empty())
        fail(ErrorKind::Config, "run_matrix: need at least one seed for conventional runs");
    if (cfg.configs.empty()) fail(ErrorKind::Config, "run_matrix: no configurations");

    std::vector<BenchRow> rows;
    for (const auto& named : images) {
        for (const auto& [n, geometry] : cfg.configs) {
            auto cell = [&](InitMethod method, std::optional<std::uint32_t> seed) {
                try {
                    rows.push_back(run_config(named.image, named.name, n, geometry, method,
                                              seed, cfg.epsilon, cfg.max_iters,
                                              cfg.measure_time));
                } catch (const Error& e) {
                    BenchRow row;
                    row.image = named.name;
                    row.codebook_size = n;
                    row.geometry = geometry;
                    row.method = method;
                    row.seed = seed;
                    row.error = e.what();
                    rows.push_back(std::move(row));
                }
            };
            for (std::uint32_t seed : cfg.seeds) cell(InitMethod::Conventional, seed);
            cell(InitMethod::Modified, std::nullopt);
        }
    }
    return rows;
}

namespace detail {

inline std::string format_psnr(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string csv_safe(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = (c == ',') ? ';' : ' ';
    return s;
}

} // namespace detail

inline std::string rows_to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "image,N,block,method,seed,iterations,psnr_db,seconds,repairs,error\n";
    char buf[64];
    for (const auto& r : rows) {
        out += detail::csv_safe(r.image);
        out += ',' + std::to_string(r.codebook_size);
        out += ',' + std::to_string(r.geometry.block_w) + "x" +
               std::to_string(r.geometry.block_h);
        out += ',';
        out += method_name(r.method);
        out += ',';
        out += r.seed ? std::to_string(*r.seed) : "-";
        if (r.error.empty()) {
            out += ',' + std::to_string(r.iterations);
            out += ',' + detail::format_psnr(r.psnr_db);
            std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
            out += ',';
            out += buf;
            out += ',' + std::to_string(r.repairs);
            out += ',';
        } else {
            out += ",,,,," + detail::csv_safe(r.error);
        }
        out += '\n';
    }
    return out;
}

/// Pretty view shaped like the comparison tables: iteration counts and
/// PSNR per cell, conventional reported as the mean over seeds.
inline std::string render_tables(const std::vector<BenchRow>& rows) {
    std::vector<std::string> images;
    std::vector<std::pair<int, BlockGeometry>> configs;
    for (const auto& r : rows) {
        if (std::find(images.begin(), images.end(), r.image) == images.end())
            images.push_back(r.image);
        std::pair<int, BlockGeometry> c{r.codebook_size, r.geometry};
        if (std::find(configs.begin(), configs.end(), c) == configs.end())
            configs.push_back(c);
    }

    auto cell_text = [&](const std::string& image, const std::pair<int, BlockGeometry>& cfg,
                         InitMethod method, bool psnr_table) -> std::string {
        double sum = 0.0;
        int count = 0;
        bool err = false;
        for (const auto& r : rows) {
            if (r.image != image || r.codebook_size != cfg.first || !(r.geometry == cfg.second) ||
                r.method != method)
                continue;
            if (!r.error.empty()) {
                err = true;
                continue;
            }
            sum += psnr_table ? r.psnr_db : r.iterations;
            ++count;
        }
        if (count == 0) return err ? "err" : "-";
        char buf[32];
        if (psnr_table)
            return detail::format_psnr(sum / count);
        if (method == InitMethod::Conventional) {
            std::snprintf(buf, sizeof buf, "%.1f", sum / count);
            return buf;
        }
        std::snprintf(buf, sizeof buf, "%d", static_cast<int>(sum / count));
        return buf;
    };

    std::string out;
    for (bool psnr_table : {false, true}) {
        out += psnr_table ? "\nPSNR (dB)\n" : "Iterations to convergence\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%6s %6s %-13s", "N", "block", "method");
        out += buf;
        for (const auto& img : images) {
            std::snprintf(buf, sizeof buf, " %12s", img.substr(0, 12).c_str());
            out += buf;
        }
        out += '\n';
        for (const auto& cfg : configs) {
            for (InitMethod m : {InitMethod::Conventional, InitMethod::Modified}) {
                const std::string block = std::to_string(cfg.second.block_w) + "x" +
                                          std::to_string(cfg.second.block_h);
                std::snprintf(buf, sizeof buf, "%6d %6s %-13s", cfg.first, block.c_str(),
                              method_name(m));
                out += buf;
                for (const auto& img : images) {
                    std::snprintf(buf, sizeof buf, " %12s",
                                  cell_text(img, cfg, m, psnr_table).c_str());
                    out += buf;
                }
                out += '\n';
            }
        }
    }
    return out;
}

} // namespace pvq
