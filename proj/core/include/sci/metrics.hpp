#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sci/tensor.hpp"

namespace sci {

/// 10*log10(peak^2 / MSE), in dB. Identical frames return +infinity.
double psnr(const Measurement& a, const Measurement& b, double peak = 1.0);

/// Mean local SSIM with an 11x11 Gaussian window (std 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 1.0, reflective padding.
double ssim(const Measurement& a, const Measurement& b);

struct QualityReport {
    std::vector<double> frame_psnr;
    std::vector<double> frame_ssim;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
};

/// JSON document with frame_psnr, frame_ssim, mean_psnr, mean_ssim.
std::string quality_report_json(const QualityReport& report);
QualityReport quality_report_from_json(const std::string& text);

/// CSV with one row per frame plus a trailing mean row.
void write_quality_report_csv(const QualityReport& report, std::ostream& out);

Measurement extract_frame(const VideoCube& cube, int t);

/// Per-frame PSNR/SSIM of a reconstruction against the ground truth, plus
/// arithmetic means over frames.
QualityReport video_report(const VideoCube& x_hat, const VideoCube& truth);

} // namespace sci
