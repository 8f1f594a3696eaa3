#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sci/tensor.hpp"

namespace sci {

/// Binary tensor container: magic "SCI1", u32 dtype code (0 = f32), u32 rank,
/// u32 dims[rank], then row-major little-endian f32 payload.
struct TensorData {
    std::vector<int> dims;
    std::vector<double> values; // widened from the f32 payload

    int rank() const { return static_cast<int>(dims.size()); }
};

TensorData read_tensor(const std::string& path);
void write_tensor(const std::string& path, const TensorData& tensor);

void write_tensor(const std::string& path, const VideoCube& cube);
void write_tensor(const std::string& path, const Measurement& meas);
void write_tensor(const std::string& path, const MaskCube& mask);

VideoCube read_cube(const std::string& path);
Measurement read_measurement(const std::string& path);
MaskCube read_mask(const std::string& path);

/// Single input frame; channels is 1 (grayscale) or 3 (RGB, converted to
/// luma by the pipeline).
struct FrameImage {
    int rows = 0;
    int cols = 0;
    int channels = 1;
    std::vector<double> data; // row-major, channel fastest
};

/// Binary PGM (P5), maxval up to 65535.
FrameImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Measurement& frame, int maxval = 255);

struct PrepareOptions {
    int target_height = 256;
    int target_width = 256;
    int group_frames = 8;
};

/// Dataset-preparation pipeline: grayscale conversion (luma 0.299/0.587/0.114),
/// bilinear downsample to the target height preserving aspect ratio, center
/// crop of the width, grouping into consecutive non-overlapping cubes
/// (remainder frames dropped), and per-cube max normalization.
std::vector<VideoCube> prepare_video(const std::vector<FrameImage>& frames,
                                     const PrepareOptions& opts = {});

/// I.i.d. Bernoulli(density) mask, reproducible from the seed.
MaskCube generate_mask(int rows, int cols, int frames, double density, std::uint64_t seed);

struct DatasetSample {
    Measurement y;
    VideoCube truth;
};

/// Pairs each cube with its simulated measurement under the shared mask.
/// Per-sample noise streams are derived from (seed, sample index).
std::vector<DatasetSample> build_dataset(const std::vector<VideoCube>& videos,
                                         const MaskCube& mask, double noise_std,
                                         std::uint64_t seed);

/// Manifest describing an on-disk dataset.
struct DatasetManifest {
    std::string mask_path;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    struct Entry {
        std::string y_path;
        std::string truth_path; // empty when no ground truth
    };
    std::vector<Entry> samples;
};

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& manifest);

} // namespace sci
