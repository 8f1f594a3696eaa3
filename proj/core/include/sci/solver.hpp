#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sci/denoise.hpp"
#include "sci/operator.hpp"
#include "sci/tensor.hpp"

namespace sci {

enum class SolverVariant { admm, gap, gap_accelerated };

SolverVariant solver_variant_from_string(const std::string& name);
std::string to_string(SolverVariant variant);

struct SolverConfig {
    SolverVariant variant = SolverVariant::admm;
    double rho = 0.01; // ADMM only
    int iterations = 60;
    bool record_trace = true;
};

struct NoiseSchedule {
    std::vector<double> sigmas;
};

/// Piecewise-constant schedule: 50/255, 25/255, 12/255 in equal thirds
/// (remainder iterations go to the last block).
NoiseSchedule schedule_step(int iterations);
/// Geometric decay from 50/255 with ratio 0.97.
NoiseSchedule schedule_exponential(int iterations);
/// Constant 12/255.
NoiseSchedule schedule_constant(int iterations);

struct TracePoint {
    int iteration; // 1-based
    double residual;
    std::optional<double> psnr; // vs ground truth, when supplied
};

struct ReconTrace {
    std::vector<TracePoint> points;
};

void write_trace_csv(const ReconTrace& trace, std::ostream& out);

/// l2 residual of the data term, ||y - Phi v||_2.
double residual(const Measurement& y, const SciOperator& op, const VideoCube& v);

/// State threaded through one solver iteration. u is used by ADMM only,
/// y_acc by accelerated GAP only.
struct SolverState {
    VideoCube x;
    VideoCube v;
    VideoCube u;
    Measurement y_acc;
    int iteration = 0;
};

/// v0 = Phi^T y; u0 = 0 (ADMM); y_acc0 = 0 (accelerated GAP).
SolverState init_state(const Measurement& y, const SciOperator& op, SolverVariant variant);

/// One ADMM iteration (fast diagonal x-update followed by denoising). Shared
/// by the reconstruction loop and the unfolding tape so both paths are
/// bit-identical.
void admm_step(SolverState& state, const Measurement& y, const SciOperator& op, double rho,
               const DenoiserSpec& den, double sigma);

/// One GAP iteration, plain or accelerated. Pixels with psi = 0 use the
/// pseudo-inverse convention 1/psi := 0.
void gap_step(SolverState& state, const Measurement& y, const SciOperator& op, bool accelerated,
              const DenoiserSpec& den, double sigma);

struct ReconResult {
    VideoCube x;
    ReconTrace trace;
};

ReconResult admm_reconstruct(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                             const NoiseSchedule& sched, const SolverConfig& cfg,
                             const VideoCube* truth = nullptr);

ReconResult gap_reconstruct(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                            const NoiseSchedule& sched, const SolverConfig& cfg,
                            const VideoCube* truth = nullptr);

/// Dispatches on cfg.variant.
ReconResult reconstruct(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                        const NoiseSchedule& sched, const SolverConfig& cfg,
                        const VideoCube* truth = nullptr);

} // namespace sci
