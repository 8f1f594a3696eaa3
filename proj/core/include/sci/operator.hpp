#pragma once

#include <cstdint>

#include "sci/tensor.hpp"

namespace sci {

/// Mask-induced measurement operator. The full matrix is never materialized;
/// forward and adjoint are per-pixel sums/broadcasts, and the Gram matrix is
/// diagonal with entries psi(r, c) = number of frames observing that pixel.
class SciOperator {
public:
    /// Throws if the mask contains values other than 0/1.
    explicit SciOperator(MaskCube mask);

    const MaskCube& mask() const { return mask_; }
    /// Per-pixel overlap counts, integer-valued in [0, frames].
    const Measurement& psi() const { return psi_; }

    int rows() const { return mask_.rows; }
    int cols() const { return mask_.cols; }
    int frames() const { return mask_.frames; }

    /// Forward model: out(r, c) = sum_t cube(r, c, t) * mask(r, c, t).
    Measurement apply(const VideoCube& cube) const;

    /// Adjoint: out(r, c, t) = mask(r, c, t) * meas(r, c).
    VideoCube apply_adjoint(const Measurement& meas) const;

private:
    MaskCube mask_;
    Measurement psi_;
};

/// Forward model plus i.i.d. zero-mean Gaussian noise of the given standard
/// deviation, reproducible from the seed.
Measurement simulate_measurement(const VideoCube& video, const MaskCube& mask,
                                 double noise_std, std::uint64_t seed);

/// Column-stacked pixel index used when reporting psi entries or building
/// dense oracles: frame pixels are linearized column by column.
constexpr std::size_t column_stacked_index(int r, int c, int n_rows) {
    return static_cast<std::size_t>(r) + static_cast<std::size_t>(c) * n_rows;
}

} // namespace sci
