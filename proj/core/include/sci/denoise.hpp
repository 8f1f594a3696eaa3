#pragma once

#include <string>

#include "sci/tensor.hpp"

namespace sci {

enum class DenoiserKind { gaussian_blend, haar_soft_threshold };

/// Configuration of the plug-in denoiser D_sigma. Both kinds are analytic and
/// differentiable in sigma, which is what the unfolding trainer relies on.
struct DenoiserSpec {
    DenoiserKind kind = DenoiserKind::gaussian_blend;
    int radius = 2;      // gaussian_blend: blur kernel radius
    double kappa = 1.0;  // haar_soft_threshold: threshold scale, tau = kappa * sigma
};

DenoiserKind denoiser_kind_from_string(const std::string& name);
std::string to_string(DenoiserKind kind);

/// Applies D_sigma frame by frame.
///   gaussian_blend:      out = (1 - sigma) * z + sigma * B(z), B a fixed
///                        separable Gaussian blur with reflective padding
///   haar_soft_threshold: single-level 2-D Haar transform, soft-threshold of
///                        the detail coefficients at tau = kappa * sigma
/// Requires sigma in (0, 1) and finite input.
VideoCube denoise(const DenoiserSpec& spec, const VideoCube& z, double sigma);

struct DenoiseVjp {
    VideoCube grad_input; // (d out / d z)^T applied to the cotangent
    double grad_sigma;    // <d out / d sigma, cotangent>
};

/// Vector-Jacobian product of denoise(). At the soft-threshold kinks the
/// subgradient 0 is used.
DenoiseVjp denoise_vjp(const DenoiserSpec& spec, const VideoCube& z, double sigma,
                       const VideoCube& cotangent);

} // namespace sci
