#include "sci/operator.hpp"

#include <stdexcept>
#include <utility>

#include "sci/rng.hpp"

namespace sci {

SciOperator::SciOperator(MaskCube mask) : mask_(std::move(mask)) {
    if (!mask_.is_binary())
        throw std::invalid_argument("SciOperator: mask entries must be 0 or 1");
    psi_ = Measurement(mask_.rows, mask_.cols);
    for (int r = 0; r < mask_.rows; ++r)
        for (int c = 0; c < mask_.cols; ++c) {
            double s = 0.0;
            for (int t = 0; t < mask_.frames; ++t) s += mask_.at(r, c, t);
            psi_.at(r, c) = s;
        }
}

Measurement SciOperator::apply(const VideoCube& cube) const {
    if (cube.rows != mask_.rows || cube.cols != mask_.cols || cube.frames != mask_.frames)
        throw std::invalid_argument("SciOperator::apply: cube dims do not match mask");
    Measurement out(mask_.rows, mask_.cols);
    for (int r = 0; r < mask_.rows; ++r)
        for (int c = 0; c < mask_.cols; ++c) {
            double s = 0.0;
            for (int t = 0; t < mask_.frames; ++t) s += cube.at(r, c, t) * mask_.at(r, c, t);
            out.at(r, c) = s;
        }
    return out;
}

VideoCube SciOperator::apply_adjoint(const Measurement& meas) const {
    if (meas.rows != mask_.rows || meas.cols != mask_.cols)
        throw std::invalid_argument("SciOperator::apply_adjoint: measurement dims do not match mask");
    VideoCube out(mask_.rows, mask_.cols, mask_.frames);
    for (int r = 0; r < mask_.rows; ++r)
        for (int c = 0; c < mask_.cols; ++c) {
            const double m = meas.at(r, c);
            for (int t = 0; t < mask_.frames; ++t) out.at(r, c, t) = mask_.at(r, c, t) * m;
        }
    return out;
}

Measurement simulate_measurement(const VideoCube& video, const MaskCube& mask,
                                 double noise_std, std::uint64_t seed) {
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw std::invalid_argument("simulate_measurement: noise_std must be finite and >= 0");
    SciOperator op(mask);
    Measurement y = op.apply(video);
    if (noise_std > 0.0) {
        for (std::size_t i = 0; i < y.data.size(); ++i)
            y.data[i] += noise_std * gaussian_at(seed, i);
    }
    return y;
}

} // namespace sci
