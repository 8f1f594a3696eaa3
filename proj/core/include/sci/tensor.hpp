#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sci {

/// Rank-3 intensity volume (rows x cols x frames), row-major with the frame
/// index fastest: element (r, c, t) lives at ((r * cols) + c) * frames + t.
struct VideoCube {
    int rows = 0;
    int cols = 0;
    int frames = 0;
    std::vector<double> data;

    VideoCube() = default;
    VideoCube(int rows_, int cols_, int frames_, double fill = 0.0)
        : rows(rows_), cols(cols_), frames(frames_) {
        if (rows < 1 || cols < 1 || frames < 1)
            throw std::invalid_argument("VideoCube: all dimensions must be >= 1");
        data.assign(static_cast<std::size_t>(rows) * cols * frames, fill);
    }

    std::size_t size() const { return data.size(); }

    std::size_t index(int r, int c, int t) const {
        return (static_cast<std::size_t>(r) * cols + c) * frames + t;
    }
    double& at(int r, int c, int t) { return data[index(r, c, t)]; }
    double at(int r, int c, int t) const { return data[index(r, c, t)]; }

    bool same_dims(const VideoCube& o) const {
        return rows == o.rows && cols == o.cols && frames == o.frames;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Rank-2 measurement image (rows x cols), row-major.
struct Measurement {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Measurement() = default;
    Measurement(int rows_, int cols_, double fill = 0.0) : rows(rows_), cols(cols_) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("Measurement: dimensions must be >= 1");
        data.assign(static_cast<std::size_t>(rows) * cols, fill);
    }

    std::size_t size() const { return data.size(); }
    std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols + c; }
    double& at(int r, int c) { return data[index(r, c)]; }
    double at(int r, int c) const { return data[index(r, c)]; }

    bool same_dims(const Measurement& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Binary modulation mask, same layout as VideoCube. Entries must be 0 or 1;
/// SciOperator validates on construction.
struct MaskCube {
    int rows = 0;
    int cols = 0;
    int frames = 0;
    std::vector<double> data;

    MaskCube() = default;
    MaskCube(int rows_, int cols_, int frames_, double fill = 0.0)
        : rows(rows_), cols(cols_), frames(frames_) {
        if (rows < 1 || cols < 1 || frames < 1)
            throw std::invalid_argument("MaskCube: all dimensions must be >= 1");
        data.assign(static_cast<std::size_t>(rows) * cols * frames, fill);
    }

    std::size_t size() const { return data.size(); }
    std::size_t index(int r, int c, int t) const {
        return (static_cast<std::size_t>(r) * cols + c) * frames + t;
    }
    double& at(int r, int c, int t) { return data[index(r, c, t)]; }
    double at(int r, int c, int t) const { return data[index(r, c, t)]; }

    bool is_binary() const {
        for (double v : data)
            if (v != 0.0 && v != 1.0) return false;
        return true;
    }
};

inline double dot(const VideoCube& a, const VideoCube& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

inline double dot(const Measurement& a, const Measurement& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

inline double norm2(const Measurement& a) { return std::sqrt(dot(a, a)); }
inline double norm2(const VideoCube& a) { return std::sqrt(dot(a, a)); }

} // namespace sci
