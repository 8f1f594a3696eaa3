#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "sci/data_io.hpp"
#include "sci/operator.hpp"

using namespace sci;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sci_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// f32-representable random values so the on-disk payload round-trips exactly
std::vector<double> random_f32_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<double> v(n);
    for (double& x : v) x = static_cast<double>(dist(rng));
    return v;
}

} // namespace

TEST_CASE("tensor round-trip is bit-identical") {
    TempDir dir;
    TensorData t;
    t.dims = {3, 5, 7};
    t.values = random_f32_values(3 * 5 * 7, 1);
    write_tensor(dir.file("cube.sci"), t);
    const TensorData back = read_tensor(dir.file("cube.sci"));
    CHECK(back.dims == t.dims);
    CHECK(back.values == t.values);

    // two writes of the same tensor produce identical bytes
    write_tensor(dir.file("cube2.sci"), t);
    std::ifstream a(dir.file("cube.sci"), std::ios::binary);
    std::ifstream b(dir.file("cube2.sci"), std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    CHECK(bytes_a == bytes_b);
}

TEST_CASE("tensor header layout") {
    TempDir dir;
    Measurement m(2, 3);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = static_cast<double>(i);
    write_tensor(dir.file("m.sci"), m);
    std::ifstream in(dir.file("m.sci"), std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(bytes.size() == 4 + 4 + 4 + 2 * 4 + 6 * 4);
    CHECK(bytes.substr(0, 4) == "SCI1");
    CHECK(bytes[4] == 0); // dtype f32, little-endian
    CHECK(bytes[8] == 2); // rank
    CHECK(bytes[12] == 2);
    CHECK(bytes[16] == 3);
}

TEST_CASE("wrong magic is rejected") {
    TempDir dir;
    std::ofstream out(dir.file("bad.sci"), std::ios::binary);
    out << "XYZ1" << std::string(16, '\0');
    out.close();
    CHECK_THROWS_WITH_AS(read_tensor(dir.file("bad.sci")), doctest::Contains("magic"),
                         std::runtime_error);
}

TEST_CASE("rank-2 measurements and rank checks") {
    TempDir dir;
    Measurement m(4, 6);
    m.data = random_f32_values(24, 2);
    write_tensor(dir.file("m.sci"), m);
    const Measurement back = read_measurement(dir.file("m.sci"));
    CHECK(back.rows == 4);
    CHECK(back.cols == 6);
    CHECK(back.data == m.data);
    CHECK_THROWS_AS(read_cube(dir.file("m.sci")), std::runtime_error);

    VideoCube cube(2, 3, 4);
    cube.data = random_f32_values(24, 3);
    write_tensor(dir.file("c.sci"), cube);
    const VideoCube cback = read_cube(dir.file("c.sci"));
    CHECK(cback.data == cube.data);
    CHECK_THROWS_AS(read_measurement(dir.file("c.sci")), std::runtime_error);
}

TEST_CASE("truncated payload is detected") {
    TempDir dir;
    VideoCube cube(2, 2, 2);
    write_tensor(dir.file("c.sci"), cube);
    fs::resize_file(dir.file("c.sci"), fs::file_size(dir.file("c.sci")) - 8);
    CHECK_THROWS_WITH_AS(read_tensor(dir.file("c.sci")), doctest::Contains("truncated"),
                         std::runtime_error);
}

TEST_CASE("pgm round-trip and header parsing") {
    TempDir dir;
    Measurement frame(3, 4);
    for (std::size_t i = 0; i < frame.data.size(); ++i)
        frame.data[i] = static_cast<double>(i) / 11.0;
    write_pgm(dir.file("f.pgm"), frame);
    const FrameImage img = read_pgm(dir.file("f.pgm"));
    CHECK(img.rows == 3);
    CHECK(img.cols == 4);
    CHECK(img.channels == 1);
    for (std::size_t i = 0; i < frame.data.size(); ++i)
        CHECK(std::abs(img.data[i] - frame.data[i] * 255.0) <= 0.51);
}

TEST_CASE("pgm comments and 16-bit samples") {
    TempDir dir;
    {
        std::ofstream out(dir.file("c.pgm"), std::ios::binary);
        out << "P5\n# a comment line\n2 2\n# another\n65535\n";
        const unsigned char px[8] = {0x01, 0x00, 0x00, 0xFF, 0x80, 0x00, 0xFF, 0xFF};
        out.write(reinterpret_cast<const char*>(px), 8);
    }
    const FrameImage img = read_pgm(dir.file("c.pgm"));
    CHECK(img.rows == 2);
    CHECK(img.cols == 2);
    CHECK(img.data[0] == 256.0);
    CHECK(img.data[1] == 255.0);
    CHECK(img.data[2] == 32768.0);
    CHECK(img.data[3] == 65535.0);

    std::ofstream bad(dir.file("bad.pgm"), std::ios::binary);
    bad << "P6\n2 2\n255\n" << std::string(12, '\0');
    bad.close();
    CHECK_THROWS_AS(read_pgm(dir.file("bad.pgm")), std::runtime_error);
}

TEST_CASE("prepare_video resizes, crops, groups and normalizes") {
    // 32x32 source, target 16x16, groups of 8: 16 frames -> two cubes
    std::vector<FrameImage> frames;
    for (int t = 0; t < 16; ++t) {
        FrameImage f;
        f.rows = 32;
        f.cols = 32;
        f.data.resize(32 * 32);
        for (int r = 0; r < 32; ++r)
            for (int c = 0; c < 32; ++c)
                f.data[static_cast<std::size_t>(r) * 32 + c] = 10.0 + r + c + t;
        frames.push_back(std::move(f));
    }
    PrepareOptions opts;
    opts.target_height = 16;
    opts.target_width = 16;
    opts.group_frames = 8;
    const std::vector<VideoCube> cubes = prepare_video(frames, opts);
    REQUIRE(cubes.size() == 2);
    for (const VideoCube& cube : cubes) {
        CHECK(cube.rows == 16);
        CHECK(cube.cols == 16);
        CHECK(cube.frames == 8);
        double max_val = 0.0;
        for (double v : cube.data) max_val = std::max(max_val, v);
        CHECK(max_val == 1.0);
    }
}

TEST_CASE("already-sized grayscale input skips resize and crop") {
    std::vector<FrameImage> frames;
    for (int t = 0; t < 8; ++t) {
        FrameImage f;
        f.rows = 8;
        f.cols = 8;
        f.data.assign(64, 0.0);
        for (int i = 0; i < 64; ++i) f.data[static_cast<std::size_t>(i)] = i + t;
        frames.push_back(std::move(f));
    }
    PrepareOptions opts;
    opts.target_height = 8;
    opts.target_width = 8;
    opts.group_frames = 8;
    const std::vector<VideoCube> cubes = prepare_video(frames, opts);
    REQUIRE(cubes.size() == 1);
    const double max_val = 63.0 + 7.0;
    for (int t = 0; t < 8; ++t)
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                CHECK(std::abs(cubes[0].at(r, c, t) - (r * 8 + c + t) / max_val) <= 1e-15);
}

TEST_CASE("rgb frames are converted with luma weights") {
    std::vector<FrameImage> frames;
    for (int t = 0; t < 2; ++t) {
        FrameImage f;
        f.rows = 4;
        f.cols = 4;
        f.channels = 3;
        f.data.assign(48, 0.0);
        for (int i = 0; i < 16; ++i) {
            f.data[3 * i] = 100.0;
            f.data[3 * i + 1] = 200.0;
            f.data[3 * i + 2] = 50.0;
        }
        frames.push_back(std::move(f));
    }
    PrepareOptions opts;
    opts.target_height = 4;
    opts.target_width = 4;
    opts.group_frames = 2;
    const std::vector<VideoCube> cubes = prepare_video(frames, opts);
    REQUIRE(cubes.size() == 1);
    // constant luma, so normalization maps everything to exactly 1
    for (double v : cubes[0].data) CHECK(v == 1.0);
}

TEST_CASE("degenerate prepare inputs error out") {
    CHECK_THROWS_AS(prepare_video({}), std::invalid_argument);

    std::vector<FrameImage> zeros;
    for (int t = 0; t < 2; ++t) {
        FrameImage f;
        f.rows = 4;
        f.cols = 4;
        f.data.assign(16, 0.0);
        zeros.push_back(std::move(f));
    }
    PrepareOptions opts;
    opts.target_height = 4;
    opts.target_width = 4;
    opts.group_frames = 2;
    CHECK_THROWS_WITH_AS(prepare_video(zeros, opts), doctest::Contains("all-zero"),
                         std::invalid_argument);

    opts.target_width = 9; // wider than the source
    CHECK_THROWS_AS(prepare_video(zeros, opts), std::invalid_argument);

    opts.target_width = 4;
    opts.group_frames = 3; // fewer frames than one group
    CHECK_THROWS_AS(prepare_video(zeros, opts), std::invalid_argument);
}

TEST_CASE("mask generation") {
    const MaskCube ones = generate_mask(4, 4, 2, 1.0, 7);
    for (double v : ones.data) CHECK(v == 1.0);
    const MaskCube zeros = generate_mask(4, 4, 2, 0.0, 7);
    for (double v : zeros.data) CHECK(v == 0.0);

    const MaskCube big = generate_mask(256, 256, 8, 0.5, 11);
    double mean = 0.0;
    for (double v : big.data) mean += v;
    mean /= static_cast<double>(big.size());
    CHECK(mean >= 0.49);
    CHECK(mean <= 0.51);

    const MaskCube again = generate_mask(256, 256, 8, 0.5, 11);
    CHECK(big.data == again.data);
    const MaskCube other = generate_mask(256, 256, 8, 0.5, 12);
    CHECK(big.data != other.data);

    CHECK_THROWS_AS(generate_mask(2, 2, 2, 1.5, 0), std::invalid_argument);
}

TEST_CASE("dataset pairing") {
    const std::vector<VideoCube> videos = moving_rectangle_videos(3, 8, 8, 4, 5);
    const MaskCube mask = generate_mask(8, 8, 4, 0.5, 6);

    const std::vector<DatasetSample> clean = build_dataset(videos, mask, 0.0, 9);
    REQUIRE(clean.size() == 3);
    SciOperator op(mask);
    for (std::size_t j = 0; j < clean.size(); ++j) {
        CHECK(clean[j].truth.data == videos[j].data);
        CHECK(clean[j].y.data == op.apply(videos[j]).data);
    }

    const std::vector<DatasetSample> a = build_dataset(videos, mask, 0.01, 9);
    const std::vector<DatasetSample> b = build_dataset(videos, mask, 0.01, 9);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j].y.data == b[j].y.data);
    // per-sample noise streams differ
    CHECK(a[0].y.data != a[1].y.data);
}

TEST_CASE("manifest round-trip") {
    TempDir dir;
    DatasetManifest m;
    m.mask_path = "mask.sci";
    m.noise_std = 0.01;
    m.seed = 42;
    m.samples.push_back({"y_0000.sci", "truth_0000.sci"});
    m.samples.push_back({"y_0001.sci", ""});
    write_manifest(dir.file("manifest.json"), m);
    const DatasetManifest back = read_manifest(dir.file("manifest.json"));
    CHECK(back.mask_path == m.mask_path);
    CHECK(back.noise_std == m.noise_std);
    CHECK(back.seed == m.seed);
    REQUIRE(back.samples.size() == 2);
    CHECK(back.samples[0].y_path == "y_0000.sci");
    CHECK(back.samples[0].truth_path == "truth_0000.sci");
    CHECK(back.samples[1].truth_path.empty());
}
