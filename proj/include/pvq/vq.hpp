#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pvq/error.hpp"
#include "pvq/image.hpp"
#include "pvq/pyramid.hpp"

namespace pvq {

/// Block shape used to cut an image into training vectors.
struct BlockGeometry {
    int block_w = 0;
    int block_h = 0;

    int dim() const { return block_w * block_h; }
    bool operator==(const BlockGeometry&) const = default;
};

/// Training vectors in flat row-major storage (count * dim values).
/// Vector order follows the block grid, block row by block row.
struct TrainingSet {
    BlockGeometry geometry;
    std::size_t count = 0;
    std::vector<double> values;
    int blocks_per_row = 0;

    std::span<const double> vec(std::size_t i) const {
        const std::size_t k = static_cast<std::size_t>(geometry.dim());
        return {values.data() + i * k, k};
    }
};

/// Ordered codewords, flat storage like TrainingSet.
struct Codebook {
    BlockGeometry geometry;
    std::vector<double> values;

    std::size_t size() const {
        const auto k = static_cast<std::size_t>(geometry.dim());
        return k == 0 ? 0 : values.size() / k;
    }
    std::span<const double> codeword(std::size_t i) const {
        const std::size_t k = static_cast<std::size_t>(geometry.dim());
        return {values.data() + i * k, k};
    }
};

struct TrainingReport {
    int iterations = 0;
    std::vector<double> distortion_trace; // mean squared distortion per pass
    bool converged = false;
    double epsilon = 0.0;
    int empty_cell_repairs = 0;
};

struct Nearest {
    std::size_t index = 0;
    double dist = 0.0;
};

namespace detail {

inline double rounded_half_away(double x) {
    return x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5);
}

inline std::uint8_t to_gray(double x) {
    double r = rounded_half_away(x);
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    return static_cast<std::uint8_t>(r);
}

// Unbiased uniform draw from [0, bound) via rejection; mt19937's output
// sequence is fixed by the standard, so results are portable.
inline std::uint32_t bounded_u32(std::mt19937& rng, std::uint32_t bound) {
    const std::uint64_t limit = (0x1'0000'0000ULL / bound) * bound;
    for (;;) {
        std::uint32_t r = rng();
        if (r < limit) return static_cast<std::uint32_t>(r % bound);
    }
}

} // namespace detail

/// Cuts the image into non-overlapping blocks and flattens each block
/// row-major into one training vector. No padding: dimensions must divide.
inline TrainingSet tile_image(const GrayImage& image, BlockGeometry geometry) {
    if (geometry.block_w < 1 || geometry.block_h < 1)
        fail(ErrorKind::Config, "tile_image: block dimensions must be >= 1");
    if (image.width % geometry.block_w != 0 || image.height % geometry.block_h != 0)
        fail(ErrorKind::Tiling,
             "image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                 " does not tile into " + std::to_string(geometry.block_w) + "x" +
                 std::to_string(geometry.block_h) + " blocks");

    const int bx = image.width / geometry.block_w;
    const int by = image.height / geometry.block_h;
    const std::size_t k = static_cast<std::size_t>(geometry.dim());

    TrainingSet ts;
    ts.geometry = geometry;
    ts.count = static_cast<std::size_t>(bx) * by;
    ts.blocks_per_row = bx;
    ts.values.resize(ts.count * k);

    std::size_t out = 0;
    for (int br = 0; br < by; ++br)
        for (int bc = 0; bc < bx; ++bc)
            for (int r = 0; r < geometry.block_h; ++r)
                for (int c = 0; c < geometry.block_w; ++c)
                    ts.values[out++] =
                        image.at(br * geometry.block_h + r, bc * geometry.block_w + c);
    return ts;
}

/// Inverse of tile_image. Real-valued components are rounded half away
/// from zero and clamped to [0, 255].
inline GrayImage untile(std::span<const double> vectors, BlockGeometry geometry,
                        int image_w, int image_h) {
    const std::size_t k = static_cast<std::size_t>(geometry.dim());
    if (geometry.block_w < 1 || geometry.block_h < 1 || image_w < 1 || image_h < 1 ||
        image_w % geometry.block_w != 0 || image_h % geometry.block_h != 0)
        fail(ErrorKind::Reassembly, "untile: geometry does not tile the target image");

    const int bx = image_w / geometry.block_w;
    const int by = image_h / geometry.block_h;
    const std::size_t expected = static_cast<std::size_t>(bx) * by * k;
    if (vectors.size() != expected)
        fail(ErrorKind::Reassembly,
             "untile: got " + std::to_string(vectors.size()) + " values, expected " +
                 std::to_string(expected));

    GrayImage img;
    img.width = image_w;
    img.height = image_h;
    img.samples.resize(img.pixel_count());

    std::size_t in = 0;
    for (int br = 0; br < by; ++br)
        for (int bc = 0; bc < bx; ++bc)
            for (int r = 0; r < geometry.block_h; ++r)
                for (int c = 0; c < geometry.block_w; ++c)
                    img.at(br * geometry.block_h + r, bc * geometry.block_w + c) =
                        detail::to_gray(vectors[in++]);
    return img;
}

/// Exhaustive nearest-neighbor scan by squared Euclidean distance.
/// Ties break toward the lowest index.
inline Nearest nearest_codeword(std::span<const double> v, const Codebook& codebook) {
    const std::size_t k = static_cast<std::size_t>(codebook.geometry.dim());
    if (v.size() != k)
        fail(ErrorKind::Dimension,
             "nearest_codeword: vector has " + std::to_string(v.size()) +
                 " components, codebook expects " + std::to_string(k));

    const std::size_t n = codebook.size();
    const double* cw = codebook.values.data();
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i, cw += k) {
        double acc = 0.0;
        for (std::size_t d = 0; d < k; ++d) {
            const double diff = v[d] - cw[d];
            acc += diff * diff;
        }
        if (acc < best.dist) {
            best.dist = acc;
            best.index = i;
        }
    }
    return best;
}

/// Conventional initializer: n distinct training vectors drawn without
/// replacement from a seeded generator.
inline Codebook init_random(const TrainingSet& ts, std::size_t n, std::uint32_t seed) {
    if (n < 1) fail(ErrorKind::Config, "init_random: codebook size must be >= 1");
    if (ts.count < n)
        fail(ErrorKind::InsufficientData,
             "init_random: " + std::to_string(ts.count) + " training vectors, need " +
                 std::to_string(n));

    std::mt19937 rng(seed);
    std::vector<std::uint32_t> pool(ts.count);
    for (std::size_t i = 0; i < ts.count; ++i) pool[i] = static_cast<std::uint32_t>(i);
    // Partial Fisher-Yates: the first n slots become the selection.
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + detail::bounded_u32(rng, static_cast<std::uint32_t>(ts.count - i));
        std::swap(pool[i], pool[j]);
    }

    const std::size_t k = static_cast<std::size_t>(ts.geometry.dim());
    Codebook cb;
    cb.geometry = ts.geometry;
    cb.values.resize(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = ts.vec(pool[i]);
        std::copy(v.begin(), v.end(), cb.values.begin() + i * k);
    }
    return cb;
}

/// Pyramid initializer: reduces the image to the level whose block grid
/// has exactly n blocks and uses those blocks as the codebook. No seed;
/// fully deterministic.
inline Codebook init_pyramid(const GrayImage& image, BlockGeometry geometry, std::size_t n) {
    const int level = select_seed_level(image.width, image.height, geometry.block_w,
                                        geometry.block_h, static_cast<int>(n));
    Pyramid pyr = build_pyramid(image, level + 1);
    TrainingSet seed = tile_image(pyr.levels[level], geometry);

    Codebook cb;
    cb.geometry = geometry;
    cb.values = std::move(seed.values);
    return cb;
}

namespace detail {

// Nearest-codeword pass over all training vectors. Ranges are disjoint,
// every vector's result is independent, so the threaded split is
// bit-identical to the sequential scan.
inline void assign_pass(const TrainingSet& ts, const Codebook& cb,
                        std::vector<std::uint32_t>& index_out,
                        std::vector<double>& dist_out, int threads) {
    const std::size_t n = ts.count;
    const std::size_t N = cb.size();
    const std::size_t k = static_cast<std::size_t>(ts.geometry.dim());

    auto scan = [&](std::size_t lo, std::size_t hi) {
        const double* base = ts.values.data();
        for (std::size_t i = lo; i < hi; ++i) {
            const double* v = base + i * k;
            const double* cw = cb.values.data();
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t best_idx = 0;
            for (std::size_t c = 0; c < N; ++c, cw += k) {
                double acc = 0.0;
                for (std::size_t d = 0; d < k; ++d) {
                    const double diff = v[d] - cw[d];
                    acc += diff * diff;
                }
                if (acc < best) {
                    best = acc;
                    best_idx = static_cast<std::uint32_t>(c);
                }
            }
            index_out[i] = best_idx;
            dist_out[i] = best;
        }
    };

    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
    // Not worth spawning threads for tiny workloads.
    if (threads == 1 || n * N * k < (1u << 18)) {
        scan(0, n);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(scan, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Generalized Lloyd (LBG) training loop.
///
/// Each pass assigns every training vector to its nearest codeword
/// (lowest index wins ties), records the mean squared distortion, then
/// replaces each codeword by the centroid of its cell. Stops when the
/// distortion hits zero, when the relative drop falls to epsilon, when an
/// update leaves the codebook unchanged, or after max_iters passes.
///
/// Codewords that end up with an empty cell are repaired by stealing the
/// training vector currently farthest from its own codeword; each repair
/// is counted in the report. Donors only come from cells with at least
/// two members so a repair never empties another cell.
inline std::pair<Codebook, TrainingReport> lbg_train(const TrainingSet& ts,
                                                     const Codebook& initial,
                                                     double epsilon, int max_iters,
                                                     int threads = 0) {
    if (ts.count == 0)
        fail(ErrorKind::InsufficientData, "lbg_train: empty training set");
    if (initial.geometry.dim() != ts.geometry.dim())
        fail(ErrorKind::Dimension, "lbg_train: codebook/training dimension mismatch");
    if (!(epsilon > 0.0))
        fail(ErrorKind::Config, "lbg_train: epsilon must be > 0");
    if (max_iters < 1)
        fail(ErrorKind::Config, "lbg_train: max_iters must be >= 1");
    const std::size_t N = initial.size();
    if (N == 0)
        fail(ErrorKind::InsufficientData, "lbg_train: empty initial codebook");

    const std::size_t n = ts.count;
    const std::size_t k = static_cast<std::size_t>(ts.geometry.dim());

    Codebook cb = initial;
    TrainingReport report;
    report.epsilon = epsilon;

    std::vector<std::uint32_t> assign(n);
    std::vector<double> dist(n);
    std::vector<double> sums(N * k);
    std::vector<std::uint32_t> counts(N);
    std::vector<double> updated(N * k);

    for (int pass = 1; pass <= max_iters; ++pass) {
        detail::assign_pass(ts, cb, assign, dist, threads);

        // Sequential reduction in vector order keeps the result exact and
        // independent of the thread count.
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += dist[i];
        const double distortion = total / static_cast<double>(n);

        report.distortion_trace.push_back(distortion);
        report.iterations = pass;

        if (distortion == 0.0) {
            report.converged = true;
            break;
        }
        if (pass >= 2) {
            const double prev = report.distortion_trace[pass - 2];
            if ((prev - distortion) / distortion <= epsilon) {
                report.converged = true;
                break;
            }
        }
        if (pass == max_iters) break;

        // Centroid update, accumulated per cell in vector order.
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0u);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t cell = assign[i];
            ++counts[cell];
            const double* v = ts.values.data() + i * k;
            double* s = sums.data() + static_cast<std::size_t>(cell) * k;
            for (std::size_t d = 0; d < k; ++d) s[d] += v[d];
        }
        for (std::size_t c = 0; c < N; ++c) {
            double* u = updated.data() + c * k;
            if (counts[c] > 0) {
                const double inv = 1.0 / counts[c];
                const double* s = sums.data() + c * k;
                for (std::size_t d = 0; d < k; ++d) u[d] = s[d] * inv;
            } else {
                // Placeholder; repaired below if a donor exists.
                const double* old = cb.values.data() + c * k;
                std::copy(old, old + k, u);
            }
        }

        // Empty-cell repair: lowest empty index first, donor is the vector
        // farthest from its own (updated) codeword.
        for (std::size_t c = 0; c < N; ++c) {
            if (counts[c] > 0) continue;
            std::size_t donor = n;
            double donor_dist = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] < 2) continue;
                const double* v = ts.values.data() + i * k;
                const double* u = updated.data() + static_cast<std::size_t>(assign[i]) * k;
                double acc = 0.0;
                for (std::size_t d = 0; d < k; ++d) {
                    const double diff = v[d] - u[d];
                    acc += diff * diff;
                }
                if (acc > donor_dist) {
                    donor_dist = acc;
                    donor = i;
                }
            }
            if (donor == n) break; // no cell can spare a vector
            const double* v = ts.values.data() + donor * k;
            std::copy(v, v + k, updated.data() + c * k);
            --counts[assign[donor]];
            assign[donor] = static_cast<std::uint32_t>(c);
            counts[c] = 1;
            ++report.empty_cell_repairs;
        }

        if (updated == cb.values) {
            // Fixed point: the next pass could not change anything.
            report.converged = true;
            break;
        }
        cb.values = updated;
    }

    return {std::move(cb), std::move(report)};
}

} // namespace pvq
