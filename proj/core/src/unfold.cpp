#include "sci/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sci/rng.hpp"

namespace sci {

double sigmoid(double p) { return 1.0 / (1.0 + std::exp(-p)); }

double logit(double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("logit: argument must be in (0, 1)");
    return std::log(s / (1.0 - s));
}

NoiseSchedule TrainableSchedule::sigmas() const {
    NoiseSchedule s;
    s.sigmas.reserve(logits.size());
    for (double p : logits) s.sigmas.push_back(sigmoid(p));
    return s;
}

TrainableSchedule init_logits_step(int iterations) {
    const NoiseSchedule s = schedule_step(iterations);
    TrainableSchedule params;
    params.logits.reserve(s.sigmas.size());
    for (double sigma : s.sigmas) params.logits.push_back(logit(sigma));
    return params;
}

double loss_mse(const VideoCube& a, const VideoCube& b) {
    if (!a.same_dims(b)) throw std::invalid_argument("loss_mse: cube dims differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return s / static_cast<double>(a.data.size());
}

CheckpointPlan CheckpointPlan::make(int iterations, int segment_length) {
    if (iterations < 1) throw std::invalid_argument("CheckpointPlan: iterations must be >= 1");
    if (segment_length == 0)
        segment_length = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(iterations))));
    if (segment_length < 1 || segment_length > iterations)
        throw std::invalid_argument("CheckpointPlan: segment length out of range");
    return {iterations, segment_length};
}

std::vector<int> CheckpointPlan::boundaries() const {
    std::vector<int> b;
    for (int k = 0; k < total_iterations; k += segment_length) b.push_back(k);
    return b;
}

namespace {

constexpr double kDivergenceLimit = 1e6;

void guard(const VideoCube& cube, int iteration) {
    for (double v : cube.data)
        if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit)
            throw std::runtime_error("unfold: solver diverged at iteration " +
                                     std::to_string(iteration));
}

// out += Phi^T(m), reusing the adjoint broadcast without a temporary cube.
void sub_adjoint(const SciOperator& op, const Measurement& m, VideoCube& out) {
    const MaskCube& mask = op.mask();
    for (int r = 0; r < mask.rows; ++r)
        for (int c = 0; c < mask.cols; ++c) {
            const double mv = m.at(r, c);
            for (int t = 0; t < mask.frames; ++t)
                out.at(r, c, t) -= mask.at(r, c, t) * mv;
        }
}

} // namespace

UnfoldProblem::UnfoldProblem(const SciOperator& op, DenoiserSpec den, SolverVariant variant,
                             double rho)
    : op_(&op), den_(den), variant_(variant), rho_(rho) {
    if (variant == SolverVariant::admm && !(rho > 0.0))
        throw std::invalid_argument("UnfoldProblem: rho must be > 0 for ADMM");
}

void UnfoldProblem::step(SolverState& state, const Measurement& y, double sigma) const {
    if (variant_ == SolverVariant::admm)
        admm_step(state, y, *op_, rho_, den_, sigma);
    else
        gap_step(state, y, *op_, variant_ == SolverVariant::gap_accelerated, den_, sigma);
}

UnrollTape UnfoldProblem::forward(const Measurement& y, const VideoCube& truth,
                                  const TrainableSchedule& params,
                                  const CheckpointPlan& plan) const {
    const int iterations = plan.total_iterations;
    if (params.size() != iterations)
        throw std::invalid_argument("forward: schedule length does not match plan");
    UnrollTape tape;
    tape.y_ = y;
    tape.truth_ = truth;
    tape.plan_ = plan;
    tape.sigmas_.reserve(params.logits.size());
    for (double p : params.logits) tape.sigmas_.push_back(sigmoid(p));

    SolverState state = init_state(y, *op_, variant_);
    for (int k = 0; k < iterations; ++k) {
        if (k % plan.segment_length == 0) tape.checkpoints_.push_back(state);
        step(state, y, tape.sigmas_[k]);
        guard(state.x, k + 1);
        guard(state.v, k + 1);
        guard(state.u, k + 1);
    }
    tape.final_x_ = state.x;
    tape.loss_ = loss_mse(state.x, truth);
    tape.peak_stored_ = static_cast<int>(tape.checkpoints_.size());
    return tape;
}

std::vector<double> UnfoldProblem::backward(UnrollTape& tape) const {
    if (tape.consumed_) throw std::logic_error("backward: tape already consumed");
    tape.consumed_ = true;

    const int iterations = tape.plan_.total_iterations;
    const int seg_len = tape.plan_.segment_length;
    const Measurement& y = tape.y_;
    const Measurement& psi = op_->psi();
    const int rows = op_->rows(), cols = op_->cols(), frames = op_->frames();

    // Loss cotangent on x^K.
    VideoCube xbar_loss(rows, cols, frames);
    {
        const double scale = 2.0 / static_cast<double>(tape.final_x_.data.size());
        for (std::size_t i = 0; i < xbar_loss.data.size(); ++i)
            xbar_loss.data[i] = scale * (tape.final_x_.data[i] - tape.truth_.data[i]);
    }

    // Cotangents on the state carried between iterations.
    VideoCube vbar(rows, cols, frames);
    VideoCube ubar(rows, cols, frames);       // ADMM
    Measurement ybar(y.rows, y.cols);         // accelerated GAP

    std::vector<double> grad_sigma(static_cast<std::size_t>(iterations), 0.0);
    std::vector<SolverState> replay;

    for (int seg = static_cast<int>(tape.checkpoints_.size()) - 1; seg >= 0; --seg) {
        const int start = seg * seg_len;
        const int end = std::min(start + seg_len, iterations);

        // Replay the segment, keeping the input state of every iteration.
        // The same step() is used as in the forward pass, so the recomputed
        // states are bit-identical.
        replay.clear();
        replay.push_back(tape.checkpoints_[seg]);
        for (int k = start; k < end - 1; ++k) {
            SolverState next = replay.back();
            step(next, y, tape.sigmas_[k]);
            replay.push_back(next);
        }
        tape.peak_stored_ = std::max(
            tape.peak_stored_, static_cast<int>(tape.checkpoints_.size() + replay.size()));

        for (int k = end - 1; k >= start; --k) {
            const SolverState& in = replay[static_cast<std::size_t>(k - start)];
            const double sigma = tape.sigmas_[static_cast<std::size_t>(k)];
            const bool last = (k == iterations - 1);

            // Recompute the iteration's intermediates with the forward code.
            SolverState out = in;
            step(out, y, sigma);

            if (variant_ == SolverVariant::admm) {
                // z = x + u_in is the denoiser input.
                VideoCube z(rows, cols, frames);
                for (std::size_t i = 0; i < z.data.size(); ++i)
                    z.data[i] = out.x.data[i] + in.u.data[i];
                // u' = u + x - v'
                VideoCube vden(rows, cols, frames);
                for (std::size_t i = 0; i < vden.data.size(); ++i)
                    vden.data[i] = vbar.data[i] - ubar.data[i];
                VideoCube xbar = ubar;
                if (last)
                    for (std::size_t i = 0; i < xbar.data.size(); ++i)
                        xbar.data[i] += xbar_loss.data[i];
                // v' = D_sigma(z)
                DenoiseVjp vjp = denoise_vjp(den_, z, sigma, vden);
                grad_sigma[static_cast<std::size_t>(k)] = vjp.grad_sigma;
                VideoCube ubar_next = ubar;
                for (std::size_t i = 0; i < xbar.data.size(); ++i) {
                    xbar.data[i] += vjp.grad_input.data[i];
                    ubar_next.data[i] += vjp.grad_input.data[i];
                }
                // x = d + Phi^T(Psi (y - Phi d)), d = v - u
                Measurement wbar = op_->apply(xbar);
                for (std::size_t i = 0; i < wbar.data.size(); ++i)
                    wbar.data[i] /= (rho_ + psi.data[i]);
                VideoCube dbar = xbar;
                sub_adjoint(*op_, wbar, dbar);
                for (std::size_t i = 0; i < vbar.data.size(); ++i) {
                    vbar.data[i] = dbar.data[i];
                    ubar.data[i] = ubar_next.data[i] - dbar.data[i];
                }
            } else {
                const bool accelerated = (variant_ == SolverVariant::gap_accelerated);
                // v' = D_sigma(x)
                DenoiseVjp vjp = denoise_vjp(den_, out.x, sigma, vbar);
                grad_sigma[static_cast<std::size_t>(k)] = vjp.grad_sigma;
                VideoCube xbar = vjp.grad_input;
                if (last)
                    for (std::size_t i = 0; i < xbar.data.size(); ++i)
                        xbar.data[i] += xbar_loss.data[i];
                // x = v + Phi^T(PsiTilde w)
                Measurement wbar = op_->apply(xbar);
                for (std::size_t i = 0; i < wbar.data.size(); ++i)
                    wbar.data[i] = psi.data[i] > 0.0 ? wbar.data[i] / psi.data[i] : 0.0;
                VideoCube vbar_new = xbar;
                if (accelerated) {
                    // w = y_acc' - Phi v; y_acc' = y_acc + y - Phi v
                    Measurement ybar_acc = ybar;
                    for (std::size_t i = 0; i < ybar_acc.data.size(); ++i)
                        ybar_acc.data[i] += wbar.data[i];
                    sub_adjoint(*op_, wbar, vbar_new);
                    sub_adjoint(*op_, ybar_acc, vbar_new);
                    ybar = ybar_acc;
                } else {
                    // w = y - Phi v
                    sub_adjoint(*op_, wbar, vbar_new);
                }
                vbar = vbar_new;
            }
        }
        tape.checkpoints_.pop_back();
    }

    std::vector<double> grad(static_cast<std::size_t>(iterations), 0.0);
    for (int k = 0; k < iterations; ++k) {
        const double s = tape.sigmas_[static_cast<std::size_t>(k)];
        grad[static_cast<std::size_t>(k)] = grad_sigma[static_cast<std::size_t>(k)] * s * (1.0 - s);
    }
    return grad;
}

std::vector<double> UnfoldProblem::gradient(const Measurement& y, const VideoCube& truth,
                                            const TrainableSchedule& params,
                                            const CheckpointPlan& plan, double* loss_out) const {
    UnrollTape tape = forward(y, truth, params, plan);
    if (loss_out) *loss_out = tape.loss();
    return backward(tape);
}

void adam_step(AdamState& state, TrainableSchedule& params, const std::vector<double>& grad) {
    if (grad.size() != params.logits.size() || state.m.size() != params.logits.size())
        throw std::invalid_argument("adam_step: size mismatch");
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params.logits[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

TrainResult train(const std::vector<TrainingSample>& dataset, const SciOperator& op,
                  const TrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    if (cfg.epochs < 1 || cfg.minibatch < 1 || cfg.iterations < 1)
        throw std::invalid_argument("train: epochs, minibatch and iterations must be positive");

    const CheckpointPlan plan = CheckpointPlan::make(cfg.iterations, cfg.checkpoint_segment);
    const CheckpointPlan eval_plan = CheckpointPlan::make(cfg.iterations, cfg.iterations);
    UnfoldProblem problem(op, cfg.denoiser, cfg.variant, cfg.rho);

    TrainResult result;
    result.schedule = init_logits_step(cfg.iterations);

    for (std::size_t j = 0; j < dataset.size(); ++j) {
        UnrollTape tape = problem.forward(dataset[j].y, dataset[j].truth, result.schedule, eval_plan);
        result.initial_mean_loss += tape.loss();
    }
    result.initial_mean_loss /= static_cast<double>(dataset.size());

    AdamState adam(cfg.iterations, cfg.lr);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            std::iota(order.begin(), order.end(), 0);
            const std::uint64_t epoch_seed = counter_hash(cfg.seed, static_cast<std::uint64_t>(epoch));
            for (std::size_t i = order.size() - 1; i > 0; --i) {
                const std::size_t j = counter_hash(epoch_seed, i) % (i + 1);
                std::swap(order[i], order[j]);
            }
        }
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.minibatch) {
            const std::size_t end_idx =
                std::min(begin + static_cast<std::size_t>(cfg.minibatch), order.size());
            std::vector<double> batch_grad(static_cast<std::size_t>(cfg.iterations), 0.0);
            for (std::size_t i = begin; i < end_idx; ++i) {
                const TrainingSample& sample = dataset[order[i]];
                double loss = 0.0;
                std::vector<double> g =
                    problem.gradient(sample.y, sample.truth, result.schedule, plan, &loss);
                if (!std::isfinite(loss))
                    throw std::runtime_error("train: NaN loss on sample " +
                                             std::to_string(order[i]));
                epoch_loss += loss;
                for (std::size_t k = 0; k < batch_grad.size(); ++k) batch_grad[k] += g[k];
            }
            const double inv = 1.0 / static_cast<double>(end_idx - begin);
            for (double& g : batch_grad) g *= inv;
            adam_step(adam, result.schedule, batch_grad);
        }
        result.log.push_back({epoch, epoch_loss / static_cast<double>(dataset.size())});
    }
    return result;
}

} // namespace sci
