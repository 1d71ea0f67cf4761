#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "pvq/error.hpp"
#include "pvq/image.hpp"
#include "pvq/vq.hpp"

namespace pvq {

/// Per-block codeword indices, row-major over the block grid.
struct IndexTable {
    int blocks_x = 0;
    int blocks_y = 0;
    std::vector<std::uint32_t> indices;
};

/// A self-contained compressed image: the quantized codebook plus the
/// index table. The codebook components are integral (already rounded to
/// 8 bits) so decode is reproducible from the file alone.
struct CompressedImage {
    int image_w = 0;
    int image_h = 0;
    BlockGeometry geometry;
    Codebook codebook;
    IndexTable index_table;
};

/// Rounds every component half away from zero and clamps to [0, 255],
/// matching what serialization stores.
inline Codebook quantize_codebook(const Codebook& cb) {
    Codebook q = cb;
    for (auto& v : q.values) v = static_cast<double>(detail::to_gray(v));
    return q;
}

/// Assigns each image block the index of its nearest codeword. The
/// codebook is quantized first, so the stored indices are optimal with
/// respect to the codebook the decoder will actually use.
inline CompressedImage encode(const GrayImage& image, const Codebook& codebook) {
    if (codebook.size() == 0)
        fail(ErrorKind::InsufficientData, "encode: empty codebook");
    TrainingSet blocks = tile_image(image, codebook.geometry);

    CompressedImage out;
    out.image_w = image.width;
    out.image_h = image.height;
    out.geometry = codebook.geometry;
    out.codebook = quantize_codebook(codebook);
    out.index_table.blocks_x = blocks.blocks_per_row;
    out.index_table.blocks_y = static_cast<int>(blocks.count) / blocks.blocks_per_row;
    out.index_table.indices.resize(blocks.count);
    for (std::size_t i = 0; i < blocks.count; ++i)
        out.index_table.indices[i] =
            static_cast<std::uint32_t>(nearest_codeword(blocks.vec(i), out.codebook).index);
    return out;
}

/// Rebuilds the image by tiling each block's codeword back into place.
inline GrayImage decode(const CompressedImage& compressed) {
    const std::size_t N = compressed.codebook.size();
    const std::size_t k = static_cast<std::size_t>(compressed.geometry.dim());
    const auto& table = compressed.index_table;
    std::vector<double> values(table.indices.size() * k);
    for (std::size_t i = 0; i < table.indices.size(); ++i) {
        const std::uint32_t idx = table.indices[i];
        if (idx >= N)
            fail(ErrorKind::Corruption,
                 "decode: index " + std::to_string(idx) + " out of range for codebook of " +
                     std::to_string(N));
        auto cw = compressed.codebook.codeword(idx);
        std::copy(cw.begin(), cw.end(), values.begin() + i * k);
    }
    return untile(values, compressed.geometry, compressed.image_w, compressed.image_h);
}

namespace detail {

constexpr char kPvqMagic[4] = {'P', 'V', 'Q', '1'};
constexpr std::uint16_t kPvqVersion = 1;
constexpr std::size_t kPvqHeaderSize = 24;

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
inline std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t pos) {
    return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}
inline std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t pos) {
    return static_cast<std::uint32_t>(b[pos]) | (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
           (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
           (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

inline int index_width_for(std::size_t n) { return n <= 256 ? 1 : 2; }

} // namespace detail

/// On-disk layout, little-endian, no padding or checksum:
///   0-3   magic "PVQ1"
///   4-5   format version (1)
///   6-9   image width        10-13 image height
///   14-15 block width        16-17 block height
///   18-21 codebook size N    22-23 index width in bytes (1 if N <= 256, else 2)
///   then N * block_w * block_h codeword bytes (codeword-major, row-major in block)
///   then blocks_y * blocks_x indices at the declared width, row-major
inline std::vector<std::uint8_t> serialize(const CompressedImage& compressed) {
    const std::size_t N = compressed.codebook.size();
    const std::size_t k = static_cast<std::size_t>(compressed.geometry.dim());
    const int iw = detail::index_width_for(N);

    std::vector<std::uint8_t> out;
    out.reserve(detail::kPvqHeaderSize + N * k + compressed.index_table.indices.size() * iw);
    out.insert(out.end(), detail::kPvqMagic, detail::kPvqMagic + 4);
    detail::put_u16(out, detail::kPvqVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(compressed.image_w));
    detail::put_u32(out, static_cast<std::uint32_t>(compressed.image_h));
    detail::put_u16(out, static_cast<std::uint16_t>(compressed.geometry.block_w));
    detail::put_u16(out, static_cast<std::uint16_t>(compressed.geometry.block_h));
    detail::put_u32(out, static_cast<std::uint32_t>(N));
    detail::put_u16(out, static_cast<std::uint16_t>(iw));

    for (double v : compressed.codebook.values) out.push_back(detail::to_gray(v));

    for (std::uint32_t idx : compressed.index_table.indices) {
        out.push_back(static_cast<std::uint8_t>(idx & 0xFF));
        if (iw == 2) out.push_back(static_cast<std::uint8_t>((idx >> 8) & 0xFF));
    }
    return out;
}

inline CompressedImage deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < detail::kPvqHeaderSize)
        fail(ErrorKind::Truncation, "pvq: header truncated");
    if (std::memcmp(bytes.data(), detail::kPvqMagic, 4) != 0)
        fail(ErrorKind::Format, "pvq: bad magic");
    if (detail::get_u16(bytes, 4) != detail::kPvqVersion)
        fail(ErrorKind::Format,
             "pvq: unsupported format version " + std::to_string(detail::get_u16(bytes, 4)));

    CompressedImage c;
    c.image_w = static_cast<int>(detail::get_u32(bytes, 6));
    c.image_h = static_cast<int>(detail::get_u32(bytes, 10));
    c.geometry.block_w = detail::get_u16(bytes, 14);
    c.geometry.block_h = detail::get_u16(bytes, 16);
    const std::uint32_t N = detail::get_u32(bytes, 18);
    const std::uint16_t iw = detail::get_u16(bytes, 22);

    if (c.image_w < 1 || c.image_h < 1 || c.geometry.block_w < 1 || c.geometry.block_h < 1 ||
        N < 1)
        fail(ErrorKind::Corruption, "pvq: non-positive dimension field");
    if (c.image_w % c.geometry.block_w != 0 || c.image_h % c.geometry.block_h != 0)
        fail(ErrorKind::Corruption, "pvq: geometry does not tile the image");
    if (iw != detail::index_width_for(N))
        fail(ErrorKind::Corruption, "pvq: index width inconsistent with codebook size");

    const std::size_t k = static_cast<std::size_t>(c.geometry.dim());
    const std::size_t bx = static_cast<std::size_t>(c.image_w) / c.geometry.block_w;
    const std::size_t by = static_cast<std::size_t>(c.image_h) / c.geometry.block_h;
    const std::size_t expected = detail::kPvqHeaderSize + N * k + bx * by * iw;
    if (bytes.size() < expected)
        fail(ErrorKind::Truncation,
             "pvq: payload truncated, need " + std::to_string(expected) + " bytes, have " +
                 std::to_string(bytes.size()));
    if (bytes.size() > expected)
        fail(ErrorKind::Corruption,
             "pvq: " + std::to_string(bytes.size() - expected) + " trailing bytes");

    std::size_t pos = detail::kPvqHeaderSize;
    c.codebook.geometry = c.geometry;
    c.codebook.values.resize(N * k);
    for (std::size_t i = 0; i < N * k; ++i) c.codebook.values[i] = bytes[pos++];

    c.index_table.blocks_x = static_cast<int>(bx);
    c.index_table.blocks_y = static_cast<int>(by);
    c.index_table.indices.resize(bx * by);
    for (auto& idx : c.index_table.indices) {
        idx = bytes[pos++];
        if (iw == 2) idx |= static_cast<std::uint32_t>(bytes[pos++]) << 8;
        if (idx >= N)
            fail(ErrorKind::Corruption,
                 "pvq: index " + std::to_string(idx) + " out of range for codebook of " +
                     std::to_string(N));
    }
    return c;
}

/// Raw pixel bytes divided by serialized size.
inline double compression_ratio(const CompressedImage& compressed) {
    const std::size_t N = compressed.codebook.size();
    const std::size_t k = static_cast<std::size_t>(compressed.geometry.dim());
    const std::size_t serialized = detail::kPvqHeaderSize + N * k +
                                   compressed.index_table.indices.size() *
                                       static_cast<std::size_t>(detail::index_width_for(N));
    const double raw =
        static_cast<double>(compressed.image_w) * static_cast<double>(compressed.image_h);
    return raw / static_cast<double>(serialized);
}

// Codebook sidecar file used by the CLI: "PVQC", version u16, block_w u16,
// block_h u16, N u32, then N * block_w * block_h rounded codeword bytes.
inline void save_codebook_file(const Codebook& cb, const std::string& path) {
    std::vector<std::uint8_t> out;
    out.push_back('P'); out.push_back('V'); out.push_back('Q'); out.push_back('C');
    detail::put_u16(out, 1);
    detail::put_u16(out, static_cast<std::uint16_t>(cb.geometry.block_w));
    detail::put_u16(out, static_cast<std::uint16_t>(cb.geometry.block_h));
    detail::put_u32(out, static_cast<std::uint32_t>(cb.size()));
    for (double v : cb.values) out.push_back(detail::to_gray(v));

    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) fail(ErrorKind::Io, "write failed: " + path);
}

inline Codebook load_codebook_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 14) fail(ErrorKind::Truncation, "codebook file truncated");
    if (std::memcmp(bytes.data(), "PVQC", 4) != 0)
        fail(ErrorKind::Format, "codebook file: bad magic");
    if (detail::get_u16(bytes, 4) != 1)
        fail(ErrorKind::Format, "codebook file: unsupported version");

    Codebook cb;
    cb.geometry.block_w = detail::get_u16(bytes, 6);
    cb.geometry.block_h = detail::get_u16(bytes, 8);
    const std::uint32_t N = detail::get_u32(bytes, 10);
    if (cb.geometry.block_w < 1 || cb.geometry.block_h < 1 || N < 1)
        fail(ErrorKind::Corruption, "codebook file: non-positive field");
    const std::size_t k = static_cast<std::size_t>(cb.geometry.dim());
    if (bytes.size() != 14 + N * k)
        fail(ErrorKind::Truncation, "codebook file: size mismatch");
    cb.values.resize(N * k);
    for (std::size_t i = 0; i < N * k; ++i) cb.values[i] = bytes[14 + i];
    return cb;
}

} // namespace pvq
