#include "sci/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sci/operator.hpp"
#include "sci/rng.hpp"

namespace sci {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'I', '1'};
constexpr std::uint32_t kDtypeF32 = 0;

void write_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xFF),
                                    static_cast<unsigned char>((v >> 8) & 0xFF),
                                    static_cast<unsigned char>((v >> 16) & 0xFF),
                                    static_cast<unsigned char>((v >> 24) & 0xFF)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw std::runtime_error("tensor file: truncated header");
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
}

float read_f32(std::istream& in) {
    const std::uint32_t bits = read_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void write_tensor_impl(const std::string& path, const std::vector<int>& dims,
                       const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 4);
    write_u32(out, kDtypeF32);
    write_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) write_u32(out, static_cast<std::uint32_t>(d));
    for (double v : values) write_f32(out, static_cast<float>(v));
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace

TensorData read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("tensor file: bad magic in " + path);
    if (read_u32(in) != kDtypeF32) throw std::runtime_error("tensor file: unsupported dtype");
    const std::uint32_t rank = read_u32(in);
    if (rank < 1 || rank > 8) throw std::runtime_error("tensor file: bad rank");
    TensorData t;
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_u32(in);
        if (d < 1) throw std::runtime_error("tensor file: zero dimension");
        t.dims.push_back(static_cast<int>(d));
        count *= d;
    }
    t.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) t.values.push_back(read_f32(in));
    if (!in) throw std::runtime_error("tensor file: truncated payload in " + path);
    return t;
}

void write_tensor(const std::string& path, const TensorData& tensor) {
    write_tensor_impl(path, tensor.dims, tensor.values);
}

void write_tensor(const std::string& path, const VideoCube& cube) {
    write_tensor_impl(path, {cube.rows, cube.cols, cube.frames}, cube.data);
}

void write_tensor(const std::string& path, const Measurement& meas) {
    write_tensor_impl(path, {meas.rows, meas.cols}, meas.data);
}

void write_tensor(const std::string& path, const MaskCube& mask) {
    write_tensor_impl(path, {mask.rows, mask.cols, mask.frames}, mask.data);
}

VideoCube read_cube(const std::string& path) {
    TensorData t = read_tensor(path);
    if (t.rank() != 3) throw std::runtime_error("expected rank-3 tensor in " + path);
    VideoCube cube(t.dims[0], t.dims[1], t.dims[2]);
    cube.data = std::move(t.values);
    return cube;
}

Measurement read_measurement(const std::string& path) {
    TensorData t = read_tensor(path);
    if (t.rank() != 2) throw std::runtime_error("expected rank-2 tensor in " + path);
    Measurement m(t.dims[0], t.dims[1]);
    m.data = std::move(t.values);
    return m;
}

MaskCube read_mask(const std::string& path) {
    TensorData t = read_tensor(path);
    if (t.rank() != 3) throw std::runtime_error("expected rank-3 tensor in " + path);
    MaskCube mask(t.dims[0], t.dims[1], t.dims[2]);
    mask.data = std::move(t.values);
    return mask;
}

namespace {

int pgm_token(std::istream& in) {
    // Skips whitespace and '#' comments, then parses a decimal integer.
    int ch = in.get();
    while (in) {
        if (ch == '#') {
            while (in && ch != '\n') ch = in.get();
        } else if (std::isspace(ch)) {
            ch = in.get();
        } else {
            break;
        }
    }
    if (!in || !std::isdigit(ch)) throw std::runtime_error("PGM: malformed header");
    int value = 0;
    while (in && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = in.get();
    }
    return value;
}

} // namespace

FrameImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char p, five;
    in.get(p);
    in.get(five);
    if (p != 'P' || five != '5') throw std::runtime_error("PGM: not a binary P5 file: " + path);
    const int cols = pgm_token(in);
    const int rows = pgm_token(in);
    const int maxval = pgm_token(in);
    if (cols < 1 || rows < 1 || maxval < 1 || maxval > 65535)
        throw std::runtime_error("PGM: bad dimensions or maxval in " + path);
    FrameImage img;
    img.rows = rows;
    img.cols = cols;
    img.channels = 1;
    img.data.resize(static_cast<std::size_t>(rows) * cols);
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(img.data.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw std::runtime_error("PGM: truncated pixel data in " + path);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        if (bytes == 1)
            img.data[i] = raw[i];
        else
            img.data[i] = raw[2 * i] * 256 + raw[2 * i + 1]; // big-endian per spec
    }
    return img;
}

void write_pgm(const std::string& path, const Measurement& frame, int maxval) {
    if (maxval < 1 || maxval > 255) throw std::invalid_argument("write_pgm: maxval must be 1..255");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n" << frame.cols << ' ' << frame.rows << '\n' << maxval << '\n';
    for (double v : frame.data) {
        const double clipped = std::clamp(v, 0.0, 1.0);
        out.put(static_cast<char>(static_cast<int>(std::lround(clipped * maxval))));
    }
}

namespace {

std::vector<double> to_gray(const FrameImage& img) {
    if (img.channels == 1) return img.data;
    if (img.channels != 3) throw std::invalid_argument("prepare_video: channels must be 1 or 3");
    std::vector<double> gray(static_cast<std::size_t>(img.rows) * img.cols);
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                  0.114 * img.data[3 * i + 2];
    return gray;
}

// Bilinear resample with the pixel-center convention.
std::vector<double> resize_bilinear(const std::vector<double>& src, int src_rows, int src_cols,
                                    int dst_rows, int dst_cols) {
    std::vector<double> dst(static_cast<std::size_t>(dst_rows) * dst_cols);
    const double sr = static_cast<double>(src_rows) / dst_rows;
    const double sc = static_cast<double>(src_cols) / dst_cols;
    for (int r = 0; r < dst_rows; ++r) {
        double fr = (r + 0.5) * sr - 0.5;
        fr = std::clamp(fr, 0.0, static_cast<double>(src_rows - 1));
        const int r0 = static_cast<int>(fr);
        const int r1 = std::min(r0 + 1, src_rows - 1);
        const double wr = fr - r0;
        for (int c = 0; c < dst_cols; ++c) {
            double fc = (c + 0.5) * sc - 0.5;
            fc = std::clamp(fc, 0.0, static_cast<double>(src_cols - 1));
            const int c0 = static_cast<int>(fc);
            const int c1 = std::min(c0 + 1, src_cols - 1);
            const double wc = fc - c0;
            const double top = (1.0 - wc) * src[static_cast<std::size_t>(r0) * src_cols + c0] +
                               wc * src[static_cast<std::size_t>(r0) * src_cols + c1];
            const double bot = (1.0 - wc) * src[static_cast<std::size_t>(r1) * src_cols + c0] +
                               wc * src[static_cast<std::size_t>(r1) * src_cols + c1];
            dst[static_cast<std::size_t>(r) * dst_cols + c] = (1.0 - wr) * top + wr * bot;
        }
    }
    return dst;
}

} // namespace

std::vector<VideoCube> prepare_video(const std::vector<FrameImage>& frames,
                                     const PrepareOptions& opts) {
    if (frames.empty()) throw std::invalid_argument("prepare_video: no frames");
    if (static_cast<int>(frames.size()) < opts.group_frames)
        throw std::invalid_argument("prepare_video: fewer frames than one group");
    const int src_rows = frames[0].rows, src_cols = frames[0].cols;
    for (const FrameImage& f : frames)
        if (f.rows != src_rows || f.cols != src_cols)
            throw std::invalid_argument("prepare_video: frames differ in size");

    const int dst_rows = opts.target_height;
    const int dst_cols =
        src_rows == dst_rows
            ? src_cols
            : static_cast<int>(std::lround(static_cast<double>(src_cols) * dst_rows / src_rows));
    if (dst_cols < opts.target_width)
        throw std::invalid_argument("prepare_video: frame narrower than target after resize");
    const int crop_off = (dst_cols - opts.target_width) / 2;

    std::vector<std::vector<double>> processed;
    processed.reserve(frames.size());
    for (const FrameImage& f : frames) {
        std::vector<double> gray = to_gray(f);
        if (src_rows != dst_rows) gray = resize_bilinear(gray, src_rows, src_cols, dst_rows, dst_cols);
        std::vector<double> cropped(static_cast<std::size_t>(dst_rows) * opts.target_width);
        for (int r = 0; r < dst_rows; ++r)
            for (int c = 0; c < opts.target_width; ++c)
                cropped[static_cast<std::size_t>(r) * opts.target_width + c] =
                    gray[static_cast<std::size_t>(r) * dst_cols + crop_off + c];
        processed.push_back(std::move(cropped));
    }

    const int groups = static_cast<int>(frames.size()) / opts.group_frames;
    std::vector<VideoCube> cubes;
    for (int g = 0; g < groups; ++g) {
        VideoCube cube(dst_rows, opts.target_width, opts.group_frames);
        double max_val = 0.0;
        for (int t = 0; t < opts.group_frames; ++t) {
            const std::vector<double>& frame = processed[static_cast<std::size_t>(g) * opts.group_frames + t];
            for (int r = 0; r < dst_rows; ++r)
                for (int c = 0; c < opts.target_width; ++c) {
                    const double v = frame[static_cast<std::size_t>(r) * opts.target_width + c];
                    cube.at(r, c, t) = v;
                    max_val = std::max(max_val, v);
                }
        }
        if (max_val <= 0.0) throw std::invalid_argument("prepare_video: all-zero video group");
        for (double& v : cube.data) v /= max_val;
        cubes.push_back(std::move(cube));
    }
    return cubes;
}

MaskCube generate_mask(int rows, int cols, int frames, double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("generate_mask: density must be in [0, 1]");
    MaskCube mask(rows, cols, frames);
    for (std::size_t i = 0; i < mask.data.size(); ++i)
        mask.data[i] = uniform_at(seed, i) < density ? 1.0 : 0.0;
    return mask;
}

std::vector<DatasetSample> build_dataset(const std::vector<VideoCube>& videos,
                                         const MaskCube& mask, double noise_std,
                                         std::uint64_t seed) {
    std::vector<DatasetSample> samples;
    samples.reserve(videos.size());
    for (std::size_t j = 0; j < videos.size(); ++j) {
        DatasetSample s;
        s.truth = videos[j];
        s.y = simulate_measurement(videos[j], mask, noise_std, counter_hash(seed, j));
        samples.push_back(std::move(s));
    }
    return samples;
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    DatasetManifest m;
    m.mask_path = j.at("mask").get<std::string>();
    m.noise_std = j.at("noise_std").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("samples")) {
        DatasetManifest::Entry entry;
        entry.y_path = e.at("y").get<std::string>();
        if (e.contains("truth")) entry.truth_path = e.at("truth").get<std::string>();
        m.samples.push_back(std::move(entry));
    }
    return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
    nlohmann::json j;
    j["mask"] = manifest.mask_path;
    j["noise_std"] = manifest.noise_std;
    j["seed"] = manifest.seed;
    j["samples"] = nlohmann::json::array();
    for (const auto& e : manifest.samples) {
        nlohmann::json entry;
        entry["y"] = e.y_path;
        if (!e.truth_path.empty()) entry["truth"] = e.truth_path;
        j["samples"].push_back(entry);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

} // namespace sci
