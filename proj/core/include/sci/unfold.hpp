#pragma once

#include <cstdint>
#include <vector>

#include "sci/denoise.hpp"
#include "sci/operator.hpp"
#include "sci/solver.hpp"
#include "sci/tensor.hpp"

namespace sci {

double sigmoid(double p);
double logit(double s);

/// Noise-level schedule parametrized by unconstrained logits,
/// sigma_k = sigmoid(p_k) in (0, 1).
struct TrainableSchedule {
    std::vector<double> logits;

    int size() const { return static_cast<int>(logits.size()); }
    NoiseSchedule sigmas() const;
};

/// Logits whose sigmoids reproduce schedule_step(iterations).
TrainableSchedule init_logits_step(int iterations);

/// Mean over all elements of (a - b)^2.
double loss_mse(const VideoCube& a, const VideoCube& b);

/// Segmentation of the K unrolled iterations for checkpointing: forward
/// stores the solver state only at segment starts; backward replays one
/// segment at a time.
struct CheckpointPlan {
    int total_iterations = 0;
    int segment_length = 0;

    /// segment_length 0 picks the default ceil(sqrt(iterations)).
    static CheckpointPlan make(int iterations, int segment_length = 0);
    std::vector<int> boundaries() const;
};

/// Recorded forward pass of the unrolled solver. Single-owner; backward()
/// consumes it.
class UnrollTape {
public:
    double loss() const { return loss_; }
    /// High-water mark of simultaneously stored solver states (checkpoints
    /// plus the replay buffer of the segment currently being reversed).
    int peak_stored_states() const { return peak_stored_; }

private:
    friend class UnfoldProblem;
    Measurement y_;
    VideoCube truth_;
    std::vector<double> sigmas_;
    CheckpointPlan plan_;
    std::vector<SolverState> checkpoints_;
    VideoCube final_x_;
    double loss_ = 0.0;
    bool consumed_ = false;
    int peak_stored_ = 0;
};

/// Forward/backward machinery for one (operator, denoiser, solver) binding.
/// forward() runs the exact same per-iteration updates as the reconstruction
/// loops, so losses match reconstruct() bit for bit; backward() replays
/// segments from checkpoints and propagates analytic adjoints of the linear
/// updates plus the denoiser VJP, ending with the sigmoid chain rule.
class UnfoldProblem {
public:
    UnfoldProblem(const SciOperator& op, DenoiserSpec den, SolverVariant variant, double rho);

    UnrollTape forward(const Measurement& y, const VideoCube& truth,
                       const TrainableSchedule& params, const CheckpointPlan& plan) const;

    /// d loss / d logits. The tape is consumed; calling twice throws.
    std::vector<double> backward(UnrollTape& tape) const;

    /// forward + backward in one call.
    std::vector<double> gradient(const Measurement& y, const VideoCube& truth,
                                 const TrainableSchedule& params, const CheckpointPlan& plan,
                                 double* loss_out = nullptr) const;

private:
    const SciOperator* op_;
    DenoiserSpec den_;
    SolverVariant variant_;
    double rho_;

    void step(SolverState& state, const Measurement& y, double sigma) const;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(int n, double lr_ = 0.01)
        : m(static_cast<std::size_t>(n), 0.0), v(static_cast<std::size_t>(n), 0.0), lr(lr_) {}
};

/// One Adam update with bias correction.
void adam_step(AdamState& state, TrainableSchedule& params, const std::vector<double>& grad);

struct TrainingSample {
    Measurement y;
    VideoCube truth;
};

struct TrainConfig {
    int epochs = 10;
    int minibatch = 5;
    int iterations = 60;
    double rho = 0.01;
    double lr = 0.01;
    SolverVariant variant = SolverVariant::admm;
    DenoiserSpec denoiser;
    std::uint64_t seed = 0;
    int checkpoint_segment = 0; // 0 -> default ceil(sqrt(iterations))
    bool shuffle = true;
};

struct EpochLog {
    int epoch; // 1-based
    double mean_loss;
};

struct TrainResult {
    TrainableSchedule schedule;
    std::vector<EpochLog> log;
    double initial_mean_loss = 0.0; // dataset mean loss before any update
};

/// Minibatch training of the noise-level logits: per-minibatch gradients are
/// the arithmetic mean of per-sample gradients accumulated in fixed sample
/// order, followed by one Adam step. Shuffling (when enabled) reseeds
/// deterministically per epoch from (seed, epoch).
TrainResult train(const std::vector<TrainingSample>& dataset, const SciOperator& op,
                  const TrainConfig& cfg);

} // namespace sci
