#pragma once

// Shared test utilities: dense-matrix oracles for the mask operator, plain
// random generators and the synthetic moving-rectangle clips used by the
// training tests. Everything here is independent of the per-pixel fast paths
// under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "sci/operator.hpp"
#include "sci/tensor.hpp"

namespace testutil {

using DenseMatrix = std::vector<std::vector<double>>;

// Column-stacked vectorization of one frame: n = r + c * rows; the cube
// vector concatenates frames.
inline std::vector<double> cube_to_vec(const sci::VideoCube& cube) {
    std::vector<double> v(cube.size());
    const std::size_t frame_size = static_cast<std::size_t>(cube.rows) * cube.cols;
    for (int t = 0; t < cube.frames; ++t)
        for (int c = 0; c < cube.cols; ++c)
            for (int r = 0; r < cube.rows; ++r)
                v[t * frame_size + sci::column_stacked_index(r, c, cube.rows)] = cube.at(r, c, t);
    return v;
}

inline sci::VideoCube vec_to_cube(const std::vector<double>& v, int rows, int cols, int frames) {
    sci::VideoCube cube(rows, cols, frames);
    const std::size_t frame_size = static_cast<std::size_t>(rows) * cols;
    for (int t = 0; t < frames; ++t)
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r)
                cube.at(r, c, t) = v[t * frame_size + sci::column_stacked_index(r, c, rows)];
    return cube;
}

inline std::vector<double> meas_to_vec(const sci::Measurement& m) {
    std::vector<double> v(m.size());
    for (int c = 0; c < m.cols; ++c)
        for (int r = 0; r < m.rows; ++r)
            v[sci::column_stacked_index(r, c, m.rows)] = m.at(r, c);
    return v;
}

inline sci::Measurement vec_to_meas(const std::vector<double>& v, int rows, int cols) {
    sci::Measurement m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m.at(r, c) = v[sci::column_stacked_index(r, c, rows)];
    return m;
}

// Dense measurement matrix, rows*cols by rows*cols*frames.
inline DenseMatrix materialize_phi(const sci::SciOperator& op) {
    const int rows = op.rows(), cols = op.cols(), frames = op.frames();
    const std::size_t m = static_cast<std::size_t>(rows) * cols;
    DenseMatrix phi(m, std::vector<double>(m * frames, 0.0));
    for (int t = 0; t < frames; ++t)
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) {
                const std::size_t n = sci::column_stacked_index(r, c, rows);
                phi[n][t * m + n] = op.mask().at(r, c, t);
            }
    return phi;
}

inline std::vector<double> mat_vec(const DenseMatrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

inline std::vector<double> mat_t_vec(const DenseMatrix& a, const std::vector<double>& y) {
    std::vector<double> x(a.empty() ? 0 : a[0].size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += a[i][j] * y[i];
    return x;
}

// Gaussian elimination with partial pivoting; sizes here are <= 64.
inline std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

inline sci::VideoCube random_cube(int rows, int cols, int frames, std::uint64_t seed,
                                  double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    sci::VideoCube cube(rows, cols, frames);
    for (double& v : cube.data) v = dist(rng);
    return cube;
}

inline sci::Measurement random_measurement(int rows, int cols, std::uint64_t seed,
                                           double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    sci::Measurement m(rows, cols);
    for (double& v : m.data) v = dist(rng);
    return m;
}

inline sci::MaskCube random_mask(int rows, int cols, int frames, std::uint64_t seed,
                                 double density = 0.5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    sci::MaskCube mask(rows, cols, frames);
    for (double& v : mask.data) v = dist(rng) < density ? 1.0 : 0.0;
    return mask;
}

// Bright rectangle drifting across a dim textured background; one clip per
// call with per-clip random geometry.
inline sci::VideoCube moving_rectangle_video(int rows, int cols, int frames, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pos_r(0, rows - 1), pos_c(0, cols - 1);
    std::uniform_int_distribution<int> vel(-2, 2);
    std::uniform_int_distribution<int> extent(rows / 8 + 1, rows / 3 + 1);
    std::uniform_real_distribution<double> level(0.6, 1.0);

    const int h = extent(rng), w = extent(rng);
    int r0 = pos_r(rng), c0 = pos_c(rng);
    const int vr = vel(rng), vc = vel(rng);
    const double bright = level(rng);

    sci::VideoCube cube(rows, cols, frames);
    for (int t = 0; t < frames; ++t) {
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                cube.at(r, c, t) = 0.1 + 0.05 * ((r + c) % 2); // faint checker background
        const int rr = ((r0 + t * vr) % rows + rows) % rows;
        const int cc = ((c0 + t * vc) % cols + cols) % cols;
        for (int dr = 0; dr < h; ++dr)
            for (int dc = 0; dc < w; ++dc)
                cube.at((rr + dr) % rows, (cc + dc) % cols, t) = bright;
    }
    return cube;
}

inline std::vector<sci::VideoCube> moving_rectangle_videos(int count, int rows, int cols,
                                                           int frames, std::uint64_t seed) {
    std::vector<sci::VideoCube> videos;
    for (int i = 0; i < count; ++i)
        videos.push_back(moving_rectangle_video(rows, cols, frames, seed + 1000 + i));
    return videos;
}

} // namespace testutil
