#include "sci/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sci {

DenoiserKind denoiser_kind_from_string(const std::string& name) {
    if (name == "gaussian-blend" || name == "gaussian_blend") return DenoiserKind::gaussian_blend;
    if (name == "haar" || name == "haar_soft_threshold") return DenoiserKind::haar_soft_threshold;
    throw std::invalid_argument("unknown denoiser kind: " + name);
}

std::string to_string(DenoiserKind kind) {
    return kind == DenoiserKind::gaussian_blend ? "gaussian-blend" : "haar";
}

namespace {

void check_args(const DenoiserSpec& spec, const VideoCube& z, double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("denoise: sigma must be in (0, 1)");
    if (!z.all_finite()) throw std::invalid_argument("denoise: input contains NaN/Inf");
    if (spec.kind == DenoiserKind::gaussian_blend && spec.radius < 1)
        throw std::invalid_argument("denoise: kernel radius must be >= 1");
    if (spec.kind == DenoiserKind::haar_soft_threshold && !(spec.kappa > 0.0))
        throw std::invalid_argument("denoise: kappa must be > 0");
}

// Symmetric reflection (edge repeated), folded until in range.
int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

std::vector<double> gaussian_kernel(int radius) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i); // std 1.0
        sum += k[i + radius];
    }
    for (double& w : k) w /= sum;
    return k;
}

// Separable blur of one frame: horizontal pass, then vertical pass.
void blur_frame(const VideoCube& in, VideoCube& out, int t, const std::vector<double>& k,
                int radius, std::vector<double>& tmp) {
    const int rows = in.rows, cols = in.cols;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int j = -radius; j <= radius; ++j)
                s += k[j + radius] * in.at(r, reflect(c + j, cols), t);
            tmp[static_cast<std::size_t>(r) * cols + c] = s;
        }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int j = -radius; j <= radius; ++j)
                s += k[j + radius] * tmp[static_cast<std::size_t>(reflect(r + j, rows)) * cols + c];
            out.at(r, c, t) = s;
        }
}

VideoCube blur(const VideoCube& z, int radius) {
    const std::vector<double> k = gaussian_kernel(radius);
    VideoCube out(z.rows, z.cols, z.frames);
    std::vector<double> tmp(static_cast<std::size_t>(z.rows) * z.cols);
    for (int t = 0; t < z.frames; ++t) blur_frame(z, out, t, k, radius, tmp);
    return out;
}

// Adjoint of blur(): scatter through the same reflected index maps, with the
// pass order reversed (vertical adjoint first, then horizontal adjoint).
VideoCube blur_adjoint(const VideoCube& g, int radius) {
    const std::vector<double> k = gaussian_kernel(radius);
    const int rows = g.rows, cols = g.cols;
    VideoCube out(rows, cols, g.frames);
    std::vector<double> tmp(static_cast<std::size_t>(rows) * cols);
    for (int t = 0; t < g.frames; ++t) {
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const double gv = g.at(r, c, t);
                for (int j = -radius; j <= radius; ++j)
                    tmp[static_cast<std::size_t>(reflect(r + j, rows)) * cols + c] +=
                        k[j + radius] * gv;
            }
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const double gv = tmp[static_cast<std::size_t>(r) * cols + c];
                for (int j = -radius; j <= radius; ++j)
                    out.at(r, reflect(c + j, cols), t) += k[j + radius] * gv;
            }
    }
    return out;
}

double soft(double x, double tau) {
    if (x > tau) return x - tau;
    if (x < -tau) return x + tau;
    return 0.0;
}

// Orthonormal 2x2-block Haar analysis; the same matrix is its own inverse.
struct HaarBlock {
    double a, h, v, d;
};
HaarBlock haar_fwd(double p, double q, double r, double s) {
    return {(p + q + r + s) / 2.0, (p - q + r - s) / 2.0, (p + q - r - s) / 2.0,
            (p - q - r + s) / 2.0};
}
void haar_inv(const HaarBlock& b, double& p, double& q, double& r, double& s) {
    p = (b.a + b.h + b.v + b.d) / 2.0;
    q = (b.a - b.h + b.v - b.d) / 2.0;
    r = (b.a + b.h - b.v - b.d) / 2.0;
    s = (b.a - b.h - b.v + b.d) / 2.0;
}

VideoCube haar_denoise(const VideoCube& z, double tau) {
    VideoCube out = z; // odd trailing row/col passes through unchanged
    const int er = z.rows - z.rows % 2;
    const int ec = z.cols - z.cols % 2;
    for (int t = 0; t < z.frames; ++t)
        for (int r = 0; r < er; r += 2)
            for (int c = 0; c < ec; c += 2) {
                HaarBlock b = haar_fwd(z.at(r, c, t), z.at(r, c + 1, t), z.at(r + 1, c, t),
                                       z.at(r + 1, c + 1, t));
                b.h = soft(b.h, tau);
                b.v = soft(b.v, tau);
                b.d = soft(b.d, tau);
                haar_inv(b, out.at(r, c, t), out.at(r, c + 1, t), out.at(r + 1, c, t),
                         out.at(r + 1, c + 1, t));
            }
    return out;
}

DenoiseVjp haar_vjp(const VideoCube& z, double tau, double kappa, const VideoCube& g) {
    DenoiseVjp res{g, 0.0}; // passthrough regions keep the cotangent as-is
    const int er = z.rows - z.rows % 2;
    const int ec = z.cols - z.cols % 2;
    for (int t = 0; t < z.frames; ++t)
        for (int r = 0; r < er; r += 2)
            for (int c = 0; c < ec; c += 2) {
                const HaarBlock cz = haar_fwd(z.at(r, c, t), z.at(r, c + 1, t), z.at(r + 1, c, t),
                                              z.at(r + 1, c + 1, t));
                const HaarBlock cg = haar_fwd(g.at(r, c, t), g.at(r, c + 1, t), g.at(r + 1, c, t),
                                              g.at(r + 1, c + 1, t));
                const double mh = std::abs(cz.h) > tau ? 1.0 : 0.0;
                const double mv = std::abs(cz.v) > tau ? 1.0 : 0.0;
                const double md = std::abs(cz.d) > tau ? 1.0 : 0.0;
                HaarBlock masked{cg.a, mh * cg.h, mv * cg.v, md * cg.d};
                haar_inv(masked, res.grad_input.at(r, c, t), res.grad_input.at(r, c + 1, t),
                         res.grad_input.at(r + 1, c, t), res.grad_input.at(r + 1, c + 1, t));
                res.grad_sigma -= kappa * (mh * ((cz.h > 0) - (cz.h < 0)) * cg.h +
                                           mv * ((cz.v > 0) - (cz.v < 0)) * cg.v +
                                           md * ((cz.d > 0) - (cz.d < 0)) * cg.d);
            }
    return res;
}

} // namespace

VideoCube denoise(const DenoiserSpec& spec, const VideoCube& z, double sigma) {
    check_args(spec, z, sigma);
    if (spec.kind == DenoiserKind::gaussian_blend) {
        VideoCube b = blur(z, spec.radius);
        VideoCube out(z.rows, z.cols, z.frames);
        for (std::size_t i = 0; i < z.data.size(); ++i)
            out.data[i] = (1.0 - sigma) * z.data[i] + sigma * b.data[i];
        return out;
    }
    return haar_denoise(z, spec.kappa * sigma);
}

DenoiseVjp denoise_vjp(const DenoiserSpec& spec, const VideoCube& z, double sigma,
                       const VideoCube& cotangent) {
    check_args(spec, z, sigma);
    if (!z.same_dims(cotangent))
        throw std::invalid_argument("denoise_vjp: cotangent dims do not match input");
    if (spec.kind == DenoiserKind::gaussian_blend) {
        VideoCube bz = blur(z, spec.radius);
        VideoCube bt = blur_adjoint(cotangent, spec.radius);
        DenoiseVjp res{VideoCube(z.rows, z.cols, z.frames), 0.0};
        for (std::size_t i = 0; i < z.data.size(); ++i) {
            res.grad_input.data[i] =
                (1.0 - sigma) * cotangent.data[i] + sigma * bt.data[i];
            res.grad_sigma += (bz.data[i] - z.data[i]) * cotangent.data[i];
        }
        return res;
    }
    return haar_vjp(z, spec.kappa * sigma, spec.kappa, cotangent);
}

} // namespace sci
