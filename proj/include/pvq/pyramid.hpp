#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvq/error.hpp"
#include "pvq/image.hpp"

namespace pvq {

/// Reduced-resolution pyramid. levels[0] is the original image; every
/// further level halves both dimensions.
struct Pyramid {
    std::vector<GrayImage> levels;
};

/// Low-pass filter + 2x subsample: each output pixel is the rounded mean
/// of the corresponding 2x2 input block (half rounds away from zero).
inline GrayImage reduce_once(const GrayImage& image) {
    if (image.width < 2 || image.height < 2 || image.width % 2 != 0 || image.height % 2 != 0)
        fail(ErrorKind::Dimension,
             "reduce_once: dimensions must be even and >= 2, got " +
                 std::to_string(image.width) + "x" + std::to_string(image.height));

    GrayImage out;
    out.width = image.width / 2;
    out.height = image.height / 2;
    out.samples.resize(out.pixel_count());
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            unsigned sum = image.at(2 * r, 2 * c) + image.at(2 * r, 2 * c + 1) +
                           image.at(2 * r + 1, 2 * c) + image.at(2 * r + 1, 2 * c + 1);
            // (sum + 2) / 4 rounds the mean half away from zero; the mean of
            // bytes already lies in [0, 255].
            out.at(r, c) = static_cast<std::uint8_t>((sum + 2) / 4);
        }
    }
    return out;
}

/// Repeats reduce_once until a dimension becomes odd or drops below 2, or
/// until the pyramid holds max_levels images.
inline Pyramid build_pyramid(const GrayImage& image,
                             std::optional<int> max_levels = std::nullopt) {
    if (max_levels && *max_levels < 1)
        fail(ErrorKind::Config, "build_pyramid: max_levels must be >= 1");

    Pyramid pyr;
    pyr.levels.push_back(image);
    while (!max_levels || static_cast<int>(pyr.levels.size()) < *max_levels) {
        const GrayImage& top = pyr.levels.back();
        if (top.width < 2 || top.height < 2 || top.width % 2 != 0 || top.height % 2 != 0)
            break;
        pyr.levels.push_back(reduce_once(top));
    }
    return pyr;
}

/// Finds the pyramid level whose block grid has exactly codebook_size
/// blocks. Block counts shrink by 4x per level, so at most one level can
/// match; the scan runs top-down to return the highest qualifying level.
inline int select_seed_level(int image_w, int image_h, int block_w, int block_h,
                             int codebook_size) {
    if (image_w < 1 || image_h < 1 || block_w < 1 || block_h < 1 || codebook_size < 1)
        fail(ErrorKind::Config, "select_seed_level: all arguments must be >= 1");

    std::vector<std::pair<int, int>> sizes;
    int w = image_w, h = image_h;
    sizes.emplace_back(w, h);
    while (w >= 2 && h >= 2 && w % 2 == 0 && h % 2 == 0) {
        w /= 2;
        h /= 2;
        sizes.emplace_back(w, h);
    }

    for (int level = static_cast<int>(sizes.size()) - 1; level >= 0; --level) {
        auto [lw, lh] = sizes[level];
        if (lw % block_w != 0 || lh % block_h != 0) continue;
        long long blocks = static_cast<long long>(lw / block_w) * (lh / block_h);
        if (blocks == codebook_size) return level;
    }
    fail(ErrorKind::NoExactLevel,
         "no pyramid level of " + std::to_string(image_w) + "x" + std::to_string(image_h) +
             " tiles into exactly " + std::to_string(codebook_size) + " blocks of " +
             std::to_string(block_w) + "x" + std::to_string(block_h));
}

} // namespace pvq
