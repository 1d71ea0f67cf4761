// pvq: grayscale vector-quantization codec CLI.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error,
// 3 configuration error (e.g. no pyramid level matches the codebook size).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pvq/pvq.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

pvq::BlockGeometry parse_block(const std::string& spec) {
    const auto x = spec.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= spec.size())
        throw UsageError("--block expects WxH, e.g. 4x8, got '" + spec + "'");
    try {
        const int w = std::stoi(spec.substr(0, x));
        const int h = std::stoi(spec.substr(x + 1));
        if (w < 1 || h < 1) throw UsageError("--block dimensions must be >= 1");
        return {w, h};
    } catch (const std::logic_error&) {
        throw UsageError("--block expects WxH, e.g. 4x8, got '" + spec + "'");
    }
}

pvq::SynthKind parse_kind(const std::string& kind) {
    if (kind == "gradient") return pvq::SynthKind::Gradient;
    if (kind == "checker") return pvq::SynthKind::Checker;
    if (kind == "noise") return pvq::SynthKind::Noise;
    throw UsageError("unknown synthetic kind '" + kind + "'");
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) pvq::fail(pvq::ErrorKind::Io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) pvq::fail(pvq::ErrorKind::Io, "write failed: " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) pvq::fail(pvq::ErrorKind::Io, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TrainArgs {
    std::string image_path;
    int codebook_size = 0;
    std::string block;
    std::string init;
    std::uint32_t seed = 0;
    double epsilon = 0.001;
    int max_iters = 100;
};

std::pair<pvq::Codebook, pvq::TrainingReport> train_from_args(const pvq::GrayImage& image,
                                                              const TrainArgs& args) {
    const pvq::BlockGeometry geometry = parse_block(args.block);
    pvq::TrainingSet ts = pvq::tile_image(image, geometry);
    pvq::Codebook initial;
    if (args.init == "random")
        initial = pvq::init_random(ts, static_cast<std::size_t>(args.codebook_size), args.seed);
    else if (args.init == "pyramid")
        initial =
            pvq::init_pyramid(image, geometry, static_cast<std::size_t>(args.codebook_size));
    else
        throw UsageError("--init must be 'random' or 'pyramid'");
    return pvq::lbg_train(ts, initial, args.epsilon, args.max_iters);
}

void print_report(const pvq::TrainingReport& report) {
    std::printf("iterations: %d\n", report.iterations);
    std::printf("final distortion: %.6f\n",
                report.distortion_trace.empty() ? 0.0 : report.distortion_trace.back());
    std::printf("converged: %s\n", report.converged ? "yes" : "no");
    std::printf("empty-cell repairs: %d\n", report.empty_cell_repairs);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pvq: grayscale vector-quantization codec (LBG training with random or "
                 "pyramid initialization)"};
    app.require_subcommand(1);

    // train
    TrainArgs train_args;
    std::string train_out;
    auto* train = app.add_subcommand("train", "Train a codebook from an image");
    train->add_option("image", train_args.image_path, "input PGM")->required();
    train->add_option("--codebook-size", train_args.codebook_size, "number of codewords")
        ->required();
    train->add_option("--block", train_args.block, "block size WxH")->required();
    train->add_option("--init", train_args.init, "initializer: random | pyramid")
        ->required()
        ->check(CLI::IsMember({"random", "pyramid"}));
    train->add_option("--seed", train_args.seed, "seed for random init");
    train->add_option("--epsilon", train_args.epsilon, "relative convergence threshold");
    train->add_option("--max-iters", train_args.max_iters, "iteration cap");
    train->add_option("--out", train_out, "output codebook file")->required();

    // encode
    TrainArgs enc_args;
    std::string enc_codebook, enc_out;
    auto* encode = app.add_subcommand("encode", "Encode an image to a .pvq file");
    encode->add_option("image", enc_args.image_path, "input PGM")->required();
    encode->add_option("--codebook", enc_codebook, "trained codebook file");
    encode->add_option("--codebook-size", enc_args.codebook_size,
                       "train inline: number of codewords");
    encode->add_option("--block", enc_args.block, "train inline: block size WxH");
    encode->add_option("--init", enc_args.init, "train inline: random | pyramid")
        ->check(CLI::IsMember({"random", "pyramid"}));
    encode->add_option("--seed", enc_args.seed, "train inline: seed for random init");
    encode->add_option("--epsilon", enc_args.epsilon, "train inline: convergence threshold");
    encode->add_option("--max-iters", enc_args.max_iters, "train inline: iteration cap");
    encode->add_option("--out", enc_out, "output .pvq file")->required();

    // decode
    std::string dec_in, dec_out;
    auto* decode = app.add_subcommand("decode", "Decode a .pvq file to a PGM");
    decode->add_option("file", dec_in, "input .pvq file")->required();
    decode->add_option("--out", dec_out, "output PGM")->required();

    // psnr
    std::string psnr_a, psnr_b;
    auto* psnr_cmd = app.add_subcommand("psnr", "PSNR between two PGM images");
    psnr_cmd->add_option("a", psnr_a, "first image")->required();
    psnr_cmd->add_option("b", psnr_b, "second image")->required();

    // pyramid
    std::string pyr_image, pyr_block;
    int pyr_n = 0;
    auto* pyramid = app.add_subcommand("pyramid", "Print pyramid level sizes");
    pyramid->add_option("image", pyr_image, "input PGM")->required();
    pyramid->add_option("--codebook-size", pyr_n, "also report the seed level for this size");
    pyramid->add_option("--block", pyr_block, "block size WxH for the seed level");

    // synth
    std::string synth_kind, synth_out;
    int synth_w = 0, synth_h = 0, synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic test image");
    synth->add_option("--kind", synth_kind, "gradient | checker | noise")
        ->required()
        ->check(CLI::IsMember({"gradient", "checker", "noise"}));
    synth->add_option("--width", synth_w, "image width")->required();
    synth->add_option("--height", synth_h, "image height")->required();
    synth->add_option("--seed", synth_seed, "seed for noise");
    synth->add_option("--out", synth_out, "output PGM")->required();

    // bench
    std::vector<std::string> bench_images;
    bool bench_synthetic = false, bench_table = false;
    std::string bench_out;
    int bench_seeds = 10, bench_max_iters = 100;
    double bench_epsilon = 0.001;
    auto* bench = app.add_subcommand("bench", "Run the initializer comparison matrix");
    bench->add_option("--images", bench_images, "comma-separated PGM paths")->delimiter(',');
    bench->add_flag("--synthetic", bench_synthetic, "add synthetic 512x512 images");
    bench->add_option("--out", bench_out, "output CSV path")->required();
    bench->add_option("--seeds", bench_seeds, "conventional-init seed count")
        ->check(CLI::Range(1, 1 << 20));
    bench->add_flag("--table", bench_table, "also print a table-shaped summary");
    bench->add_option("--epsilon", bench_epsilon, "convergence threshold");
    bench->add_option("--max-iters", bench_max_iters, "iteration cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train->parsed()) {
            const pvq::GrayImage image = pvq::load_pgm_file(train_args.image_path);
            auto [codebook, report] = train_from_args(image, train_args);
            pvq::save_codebook_file(codebook, train_out);
            print_report(report);
            std::printf("codebook written to %s\n", train_out.c_str());
        } else if (encode->parsed()) {
            const pvq::GrayImage image = pvq::load_pgm_file(enc_args.image_path);
            pvq::Codebook codebook;
            if (!enc_codebook.empty()) {
                codebook = pvq::load_codebook_file(enc_codebook);
            } else if (enc_args.codebook_size > 0 && !enc_args.block.empty() &&
                       !enc_args.init.empty()) {
                codebook = train_from_args(image, enc_args).first;
            } else {
                throw UsageError(
                    "encode needs --codebook, or --codebook-size/--block/--init to train inline");
            }
            const pvq::CompressedImage compressed = pvq::encode(image, codebook);
            const auto bytes = pvq::serialize(compressed);
            write_bytes(enc_out, bytes);
            std::printf("wrote %s (%zu bytes, ratio %.3f)\n", enc_out.c_str(), bytes.size(),
                        pvq::compression_ratio(compressed));
        } else if (decode->parsed()) {
            const auto bytes = read_bytes(dec_in);
            const pvq::GrayImage image = pvq::decode(pvq::deserialize(bytes));
            pvq::save_pgm_file(image, dec_out);
            std::printf("wrote %s (%dx%d)\n", dec_out.c_str(), image.width, image.height);
        } else if (psnr_cmd->parsed()) {
            const auto a = pvq::load_pgm_file(psnr_a);
            const auto b = pvq::load_pgm_file(psnr_b);
            const auto q = pvq::psnr(a, b);
            std::printf("MSE: %.4f\n", q.mse);
            if (std::isinf(q.psnr_db))
                std::printf("PSNR: inf dB\n");
            else
                std::printf("PSNR: %.4f dB\n", q.psnr_db);
        } else if (pyramid->parsed()) {
            const pvq::GrayImage image = pvq::load_pgm_file(pyr_image);
            const pvq::Pyramid pyr = pvq::build_pyramid(image);
            for (std::size_t i = 0; i < pyr.levels.size(); ++i)
                std::printf("level %zu: %dx%d\n", i, pyr.levels[i].width,
                            pyr.levels[i].height);
            if (pyr_n > 0 || !pyr_block.empty()) {
                if (pyr_n <= 0 || pyr_block.empty())
                    throw UsageError("seed-level query needs both --codebook-size and --block");
                const pvq::BlockGeometry g = parse_block(pyr_block);
                const int level = pvq::select_seed_level(image.width, image.height, g.block_w,
                                                         g.block_h, pyr_n);
                std::printf("seed level for N=%d block=%s: %d (%dx%d)\n", pyr_n,
                            pyr_block.c_str(), level, pyr.levels[level].width,
                            pyr.levels[level].height);
            }
        } else if (synth->parsed()) {
            const pvq::GrayImage image =
                pvq::synth_image(parse_kind(synth_kind), synth_w, synth_h, synth_seed);
            pvq::save_pgm_file(image, synth_out);
            std::printf("wrote %s (%dx%d)\n", synth_out.c_str(), image.width, image.height);
        } else if (bench->parsed()) {
            std::vector<pvq::NamedImage> images;
            for (const auto& path : bench_images)
                images.push_back(
                    {std::filesystem::path(path).stem().string(), pvq::load_pgm_file(path)});
            if (bench_synthetic) {
                images.push_back({"synthetic-gradient",
                                  pvq::synth_image(pvq::SynthKind::Gradient, 512, 512)});
                images.push_back(
                    {"synthetic-checker", pvq::synth_image(pvq::SynthKind::Checker, 512, 512)});
                images.push_back(
                    {"synthetic-noise", pvq::synth_image(pvq::SynthKind::Noise, 512, 512, 7)});
            }
            if (images.empty())
                throw UsageError("bench needs --images and/or --synthetic");

            pvq::BenchConfig cfg = pvq::BenchConfig::paper_defaults(bench_seeds);
            cfg.epsilon = bench_epsilon;
            cfg.max_iters = bench_max_iters;
            const auto rows = pvq::run_matrix(images, cfg);
            const std::string csv = pvq::rows_to_csv(rows);
            std::ofstream out(bench_out);
            if (!out) pvq::fail(pvq::ErrorKind::Io, "cannot open " + bench_out + " for writing");
            out << csv;
            std::printf("wrote %zu rows to %s\n", rows.size(), bench_out.c_str());
            if (bench_table) std::fputs(pvq::render_tables(rows).c_str(), stdout);
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const pvq::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return (e.kind() == pvq::ErrorKind::NoExactLevel || e.kind() == pvq::ErrorKind::Config)
                   ? 3
                   : 2;
    }
    return 0;
}
