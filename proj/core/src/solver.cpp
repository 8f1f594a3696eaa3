#include "sci/solver.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sci/metrics.hpp"

namespace sci {

namespace {

constexpr double kDivergenceLimit = 1e6;

void check_state(const VideoCube& cube, int iteration, const char* name) {
    for (double v : cube.data) {
        if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit)
            throw std::runtime_error("solver diverged: |" + std::string(name) +
                                     "| exceeded bounds at iteration " + std::to_string(iteration));
    }
}

double mean_frame_psnr(const VideoCube& x, const VideoCube& truth) {
    double s = 0.0;
    for (int t = 0; t < x.frames; ++t)
        s += psnr(extract_frame(x, t), extract_frame(truth, t));
    return s / static_cast<double>(x.frames);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ReconResult run_loop(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                     const NoiseSchedule& sched, const SolverConfig& cfg, const VideoCube* truth) {
    if (cfg.iterations < 1) throw std::invalid_argument("solver: iterations must be >= 1");
    if (static_cast<int>(sched.sigmas.size()) != cfg.iterations)
        throw std::invalid_argument("solver: schedule length does not match iteration count");
    SolverState state = init_state(y, op, cfg.variant);
    ReconResult result;
    for (int k = 0; k < cfg.iterations; ++k) {
        if (cfg.variant == SolverVariant::admm)
            admm_step(state, y, op, cfg.rho, den, sched.sigmas[k]);
        else
            gap_step(state, y, op, cfg.variant == SolverVariant::gap_accelerated, den,
                     sched.sigmas[k]);
        check_state(state.x, k + 1, "x");
        check_state(state.v, k + 1, "v");
        check_state(state.u, k + 1, "u");
        if (cfg.record_trace) {
            TracePoint pt;
            pt.iteration = k + 1;
            pt.residual = residual(y, op, state.v);
            if (truth) pt.psnr = mean_frame_psnr(state.x, *truth);
            result.trace.points.push_back(pt);
        }
    }
    result.x = state.x;
    return result;
}

} // namespace

SolverVariant solver_variant_from_string(const std::string& name) {
    if (name == "admm") return SolverVariant::admm;
    if (name == "gap") return SolverVariant::gap;
    if (name == "gap-accel" || name == "gap_accelerated") return SolverVariant::gap_accelerated;
    throw std::invalid_argument("unknown solver variant: " + name);
}

std::string to_string(SolverVariant variant) {
    switch (variant) {
    case SolverVariant::admm: return "admm";
    case SolverVariant::gap: return "gap";
    default: return "gap-accel";
    }
}

NoiseSchedule schedule_step(int iterations) {
    if (iterations < 1) throw std::invalid_argument("schedule_step: iterations must be >= 1");
    NoiseSchedule s;
    const int third = iterations / 3;
    for (int k = 0; k < iterations; ++k) {
        if (k < third)
            s.sigmas.push_back(50.0 / 255.0);
        else if (k < 2 * third)
            s.sigmas.push_back(25.0 / 255.0);
        else
            s.sigmas.push_back(12.0 / 255.0);
    }
    return s;
}

NoiseSchedule schedule_exponential(int iterations) {
    if (iterations < 1)
        throw std::invalid_argument("schedule_exponential: iterations must be >= 1");
    NoiseSchedule s;
    double sigma = 50.0 / 255.0;
    for (int k = 0; k < iterations; ++k) {
        s.sigmas.push_back(sigma);
        sigma *= 0.97;
    }
    return s;
}

NoiseSchedule schedule_constant(int iterations) {
    if (iterations < 1) throw std::invalid_argument("schedule_constant: iterations must be >= 1");
    return {std::vector<double>(static_cast<std::size_t>(iterations), 12.0 / 255.0)};
}

void write_trace_csv(const ReconTrace& trace, std::ostream& out) {
    out << "iteration,residual,psnr\n";
    for (const TracePoint& pt : trace.points) {
        out << pt.iteration << ',' << format_double(pt.residual) << ',';
        if (pt.psnr) out << format_double(*pt.psnr);
        out << '\n';
    }
}

double residual(const Measurement& y, const SciOperator& op, const VideoCube& v) {
    const Measurement phi_v = op.apply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        const double d = y.data[i] - phi_v.data[i];
        s += d * d;
    }
    return std::sqrt(s);
}

SolverState init_state(const Measurement& y, const SciOperator& op, SolverVariant variant) {
    SolverState st;
    st.v = op.apply_adjoint(y);
    st.x = VideoCube(op.rows(), op.cols(), op.frames());
    if (variant == SolverVariant::admm) st.u = VideoCube(op.rows(), op.cols(), op.frames());
    if (variant == SolverVariant::gap_accelerated) st.y_acc = Measurement(y.rows, y.cols);
    return st;
}

void admm_step(SolverState& state, const Measurement& y, const SciOperator& op, double rho,
               const DenoiserSpec& den, double sigma) {
    if (!(rho > 0.0)) throw std::invalid_argument("admm_step: rho must be > 0");
    const Measurement& psi = op.psi();
    VideoCube d(state.v.rows, state.v.cols, state.v.frames);
    for (std::size_t i = 0; i < d.data.size(); ++i)
        d.data[i] = state.v.data[i] - state.u.data[i];
    Measurement w = op.apply(d);
    for (std::size_t i = 0; i < w.data.size(); ++i)
        w.data[i] = (y.data[i] - w.data[i]) / (rho + psi.data[i]);
    const VideoCube corr = op.apply_adjoint(w);
    for (std::size_t i = 0; i < d.data.size(); ++i)
        state.x.data[i] = d.data[i] + corr.data[i];
    VideoCube z(state.x.rows, state.x.cols, state.x.frames);
    for (std::size_t i = 0; i < z.data.size(); ++i)
        z.data[i] = state.x.data[i] + state.u.data[i];
    state.v = denoise(den, z, sigma);
    for (std::size_t i = 0; i < state.u.data.size(); ++i)
        state.u.data[i] += state.x.data[i] - state.v.data[i];
    ++state.iteration;
}

void gap_step(SolverState& state, const Measurement& y, const SciOperator& op, bool accelerated,
              const DenoiserSpec& den, double sigma) {
    const Measurement& psi = op.psi();
    Measurement w = op.apply(state.v);
    if (accelerated) {
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            state.y_acc.data[i] += y.data[i] - w.data[i];
            w.data[i] = state.y_acc.data[i] - w.data[i];
        }
    } else {
        for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] = y.data[i] - w.data[i];
    }
    for (std::size_t i = 0; i < w.data.size(); ++i)
        w.data[i] = psi.data[i] > 0.0 ? w.data[i] / psi.data[i] : 0.0;
    const VideoCube corr = op.apply_adjoint(w);
    for (std::size_t i = 0; i < state.x.data.size(); ++i)
        state.x.data[i] = state.v.data[i] + corr.data[i];
    state.v = denoise(den, state.x, sigma);
    ++state.iteration;
}

ReconResult admm_reconstruct(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                             const NoiseSchedule& sched, const SolverConfig& cfg,
                             const VideoCube* truth) {
    if (cfg.variant != SolverVariant::admm)
        throw std::invalid_argument("admm_reconstruct: config variant must be admm");
    return run_loop(y, op, den, sched, cfg, truth);
}

ReconResult gap_reconstruct(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                            const NoiseSchedule& sched, const SolverConfig& cfg,
                            const VideoCube* truth) {
    if (cfg.variant == SolverVariant::admm)
        throw std::invalid_argument("gap_reconstruct: config variant must be gap or gap-accel");
    return run_loop(y, op, den, sched, cfg, truth);
}

ReconResult reconstruct(const Measurement& y, const SciOperator& op, const DenoiserSpec& den,
                        const NoiseSchedule& sched, const SolverConfig& cfg,
                        const VideoCube* truth) {
    return run_loop(y, op, den, sched, cfg, truth);
}

} // namespace sci
