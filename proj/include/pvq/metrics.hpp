#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "pvq/error.hpp"
#include "pvq/image.hpp"

namespace pvq {

struct QualityReport {
    double mse = 0.0;
    double psnr_db = 0.0; // +infinity when mse == 0
};

/// Mean squared error. The sum of squared differences is exact 64-bit
/// integer arithmetic; only the final division is floating point.
inline double mse(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height)
        fail(ErrorKind::Dimension,
             "mse: " + std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                 std::to_string(b.width) + "x" + std::to_string(b.height));
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const std::int64_t d = static_cast<std::int64_t>(a.samples[i]) - b.samples[i];
        sum += static_cast<std::uint64_t>(d * d);
    }
    return static_cast<double>(sum) / static_cast<double>(a.pixel_count());
}

/// PSNR against the fixed 8-bit peak: 10 * log10(255^2 / mse).
inline QualityReport psnr(const GrayImage& a, const GrayImage& b) {
    QualityReport q;
    q.mse = mse(a, b);
    q.psnr_db = q.mse == 0.0 ? std::numeric_limits<double>::infinity()
                             : 10.0 * std::log10(255.0 * 255.0 / q.mse);
    return q;
}

} // namespace pvq
