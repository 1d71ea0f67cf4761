#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "pvq/codec.hpp"
#include "pvq/metrics.hpp"

using namespace pvq;
using testutil::make_codebook;
using testutil::thrown_kind;

namespace {

Codebook random_codebook(std::mt19937& rng, BlockGeometry g, std::size_t n) {
    Codebook cb;
    cb.geometry = g;
    cb.values.resize(n * static_cast<std::size_t>(g.dim()));
    std::uniform_real_distribution<double> dist(0.0, 255.0);
    for (auto& v : cb.values) v = dist(rng);
    return cb;
}

} // namespace

TEST_CASE("encode maps exact-match blocks to their codeword") {
    // image made of tiles of codeword 5
    const int n = 8;
    Codebook cb;
    cb.geometry = {2, 2};
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < 4; ++d) cb.values.push_back(i * 30);

    GrayImage img{4, 4, {}};
    img.samples.assign(16, static_cast<std::uint8_t>(5 * 30));
    const auto compressed = encode(img, cb);
    for (auto idx : compressed.index_table.indices) CHECK(idx == 5);
    CHECK(decode(compressed) == img);
}

TEST_CASE("encode picks the closer codeword per block") {
    const auto cb = make_codebook({2, 2}, {{0, 0, 0, 0}, {255, 255, 255, 255}});
    GrayImage img{4, 2, {10, 10, 200, 200, 10, 10, 200, 200}};
    const auto compressed = encode(img, cb);
    CHECK(compressed.index_table.indices == std::vector<std::uint32_t>{0, 1});
    CHECK(compressed.index_table.blocks_x == 2);
    CHECK(compressed.index_table.blocks_y == 1);
}

TEST_CASE("encode propagates tiling errors") {
    const auto cb = make_codebook({2, 2}, {{0, 0, 0, 0}});
    GrayImage img{5, 2, std::vector<std::uint8_t>(10, 0)};
    CHECK(thrown_kind([&] { encode(img, cb); }) == ErrorKind::Tiling);
}

TEST_CASE("decode tiles the indexed codeword everywhere") {
    CompressedImage c;
    c.image_w = 4;
    c.image_h = 4;
    c.geometry = {2, 2};
    c.codebook = make_codebook({2, 2}, {{1, 2, 3, 4}, {9, 9, 9, 9}});
    c.index_table = {2, 2, {1, 1, 1, 1}};
    const auto img = decode(c);
    for (int br = 0; br < 2; ++br)
        for (int bc = 0; bc < 2; ++bc) {
            CHECK(img.at(br * 2, bc * 2) == 9);
            CHECK(img.at(br * 2 + 1, bc * 2 + 1) == 9);
        }

    c.index_table.indices[3] = 2; // out of range
    CHECK(thrown_kind([&] { decode(c); }) == ErrorKind::Corruption);
}

TEST_CASE("serialize produces the exact documented byte layout") {
    CompressedImage c;
    c.image_w = 2;
    c.image_h = 2;
    c.geometry = {2, 2};
    c.codebook = make_codebook({2, 2}, {{0, 64, 128, 255}, {1, 2, 3, 4}});
    c.index_table = {1, 1, {1}};

    const std::vector<std::uint8_t> expected = {
        'P', 'V', 'Q', '1',     // magic
        1,   0,                 // version
        2,   0,   0,   0,       // image_w
        2,   0,   0,   0,       // image_h
        2,   0,                 // block_w
        2,   0,                 // block_h
        2,   0,   0,   0,       // N
        1,   0,                 // index width
        0,   64,  128, 255,     // codeword 0
        1,   2,   3,   4,       // codeword 1
        1,                      // index of the single block
    };
    CHECK(serialize(c) == expected);

    const auto back = deserialize(expected);
    CHECK(back.image_w == 2);
    CHECK(back.geometry == BlockGeometry{2, 2});
    CHECK(back.codebook.values == c.codebook.values);
    CHECK(back.index_table.indices == c.index_table.indices);
}

TEST_CASE("serialize/deserialize roundtrip on randomized instances") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const int bw = 1 + static_cast<int>(rng() % 4);
        const int bh = 1 + static_cast<int>(rng() % 4);
        const std::size_t n = 1 + rng() % 12;
        const auto img =
            testutil::random_image(rng, bw * (1 + rng() % 5), bh * (1 + rng() % 5));
        const auto cb = random_codebook(rng, {bw, bh}, n);
        const auto compressed = encode(img, cb);
        const auto back = deserialize(serialize(compressed));
        CHECK(back.image_w == compressed.image_w);
        CHECK(back.image_h == compressed.image_h);
        CHECK(back.geometry == compressed.geometry);
        CHECK(back.codebook.values == compressed.codebook.values);
        CHECK(back.index_table.indices == compressed.index_table.indices);
        CHECK(decode(back) == decode(compressed));
    }
}

TEST_CASE("two-byte indices kick in above 256 codewords") {
    std::mt19937 rng(78);
    const auto img = testutil::random_image(rng, 20, 20);
    const auto cb = random_codebook(rng, {1, 1}, 300);
    const auto compressed = encode(img, cb);
    const auto bytes = serialize(compressed);
    CHECK(bytes.size() == 24 + 300 + 400 * 2);
    CHECK(bytes[22] == 2); // index width field
    const auto back = deserialize(bytes);
    CHECK(back.index_table.indices == compressed.index_table.indices);
}

TEST_CASE("deserialize rejects corrupted payloads distinctly") {
    CompressedImage c;
    c.image_w = 4;
    c.image_h = 2;
    c.geometry = {2, 2};
    c.codebook = make_codebook({2, 2}, {{0, 0, 0, 0}, {255, 255, 255, 255}});
    c.index_table = {2, 1, {0, 1}};
    const auto good = serialize(c);

    auto bad = good;
    bad[3] = 'X'; // magic "PVQX"
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Format);

    bad = good;
    bad[4] = 2; // version 2
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Format);

    CHECK(thrown_kind([&] {
              deserialize(std::span(good).first(10)); // header cut short
          }) == ErrorKind::Truncation);

    CHECK(thrown_kind([&] {
              deserialize(std::span(good).first(good.size() - 1)); // body cut short
          }) == ErrorKind::Truncation);

    bad = good;
    bad.push_back(0); // trailing byte
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Corruption);

    bad = good;
    bad.back() = 7; // index 7 >= N=2
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Corruption);

    bad = good;
    bad[6] = 5; // image_w 5 not divisible by block_w 2
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Corruption);

    bad = good;
    bad[22] = 2; // index width 2 contradicts N=2
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Corruption);

    bad = good;
    bad[18] = 0; // N = 0
    CHECK(thrown_kind([&] { deserialize(bad); }) == ErrorKind::Corruption);
}

TEST_CASE("compression ratio follows the format arithmetic") {
    // 512x512, N=256, 4x4: 24 + 256*16 + 16384*1 = 20504 bytes
    CompressedImage c;
    c.image_w = 512;
    c.image_h = 512;
    c.geometry = {4, 4};
    c.codebook.geometry = {4, 4};
    c.codebook.values.assign(256 * 16, 0.0);
    c.index_table = {128, 128, std::vector<std::uint32_t>(16384, 0)};
    CHECK(serialize(c).size() == 20504);
    CHECK_THAT(compression_ratio(c), Catch::Matchers::WithinAbs(12.785, 0.001));

    // single block, N=1: header overhead dominates
    CompressedImage tiny;
    tiny.image_w = 2;
    tiny.image_h = 2;
    tiny.geometry = {2, 2};
    tiny.codebook = make_codebook({2, 2}, {{0, 0, 0, 0}});
    tiny.index_table = {1, 1, {0}};
    CHECK(compression_ratio(tiny) < 1.0);

    // ratio grows with image area at fixed N and geometry
    double prev = 0.0;
    for (int size : {16, 32, 64, 128}) {
        CompressedImage ci;
        ci.image_w = ci.image_h = size;
        ci.geometry = {4, 4};
        ci.codebook.geometry = {4, 4};
        ci.codebook.values.assign(4 * 16, 0.0);
        const int blocks = (size / 4) * (size / 4);
        ci.index_table = {size / 4, size / 4,
                          std::vector<std::uint32_t>(static_cast<std::size_t>(blocks), 0)};
        const double ratio = compression_ratio(ci);
        CHECK(ratio > prev);
        prev = ratio;
    }
}

TEST_CASE("decode MSE equals the mean per-block distance of the stored codebook") {
    std::mt19937 rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        const int bw = 1 + static_cast<int>(rng() % 4);
        const int bh = 1 + static_cast<int>(rng() % 4);
        const auto img =
            testutil::random_image(rng, bw * (2 + rng() % 5), bh * (2 + rng() % 5));
        const auto cb = random_codebook(rng, {bw, bh}, 1 + rng() % 8);

        const auto compressed = encode(img, cb);
        const auto decoded = decode(compressed);

        const auto blocks = tile_image(img, compressed.geometry);
        double total = 0;
        for (std::size_t i = 0; i < blocks.count; ++i)
            total += nearest_codeword(blocks.vec(i), compressed.codebook).dist;

        const double expected = total / static_cast<double>(img.pixel_count());
        CHECK_THAT(mse(img, decoded), Catch::Matchers::WithinAbs(expected, 1e-9));
    }
}

TEST_CASE("encode indices are argmin against the stored codebook") {
    std::mt19937 rng(80);
    for (int trial = 0; trial < 20; ++trial) {
        const auto img = testutil::random_image(rng, 8, 8);
        const auto cb = random_codebook(rng, {2, 2}, 2 + rng() % 6);
        const auto compressed = encode(img, cb);
        const auto blocks = tile_image(img, compressed.geometry);
        for (std::size_t i = 0; i < blocks.count; ++i) {
            const auto chosen = compressed.index_table.indices[i];
            const double chosen_dist =
                nearest_codeword(blocks.vec(i), compressed.codebook).dist;
            for (std::size_t j = 0; j < compressed.codebook.size(); ++j) {
                double d = 0;
                const auto cw = compressed.codebook.codeword(j);
                const auto v = blocks.vec(i);
                for (std::size_t t = 0; t < cw.size(); ++t)
                    d += (v[t] - cw[t]) * (v[t] - cw[t]);
                CHECK(d >= chosen_dist);
                if (d == chosen_dist) CHECK(j >= chosen);
            }
        }
    }
}

TEST_CASE("quantize_codebook is idempotent and integral") {
    std::mt19937 rng(81);
    const auto cb = random_codebook(rng, {2, 2}, 6);
    const auto q = quantize_codebook(cb);
    for (double v : q.values) {
        CHECK(v == std::floor(v));
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
    }
    CHECK(quantize_codebook(q).values == q.values);
}

TEST_CASE("codebook sidecar files roundtrip") {
    testutil::TempDir tmp("pvq_codec");
    const auto cb = make_codebook({2, 2}, {{0, 1, 2, 3}, {250, 251, 252, 253}});
    save_codebook_file(cb, tmp.file("cb.pvqc"));
    const auto back = load_codebook_file(tmp.file("cb.pvqc"));
    CHECK(back.geometry == cb.geometry);
    CHECK(back.values == cb.values);

    std::ofstream junk(tmp.file("junk.pvqc"), std::ios::binary);
    junk << "NOTACODEBOOKFILE";
    junk.close();
    CHECK(thrown_kind([&] { load_codebook_file(tmp.file("junk.pvqc")); }) ==
          ErrorKind::Format);
}
