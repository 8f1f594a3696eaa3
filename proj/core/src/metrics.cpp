#include "sci/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace sci {

namespace {

int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

constexpr int kWindowRadius = 5; // 11x11 window
constexpr double kWindowStd = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kDynamicRange = 1.0;

const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> k(2 * kWindowRadius + 1);
        double sum = 0.0;
        for (int i = -kWindowRadius; i <= kWindowRadius; ++i) {
            k[i + kWindowRadius] = std::exp(-0.5 * i * i / (kWindowStd * kWindowStd));
            sum += k[i + kWindowRadius];
        }
        for (double& v : k) v /= sum;
        return k;
    }();
    return w;
}

} // namespace

double psnr(const Measurement& a, const Measurement& b, double peak) {
    if (!a.same_dims(b)) throw std::invalid_argument("psnr: frame dims differ");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Measurement& a, const Measurement& b) {
    if (!a.same_dims(b)) throw std::invalid_argument("ssim: frame dims differ");
    const std::vector<double>& w = ssim_window();
    const int rows = a.rows, cols = a.cols;
    const double c1 = (kK1 * kDynamicRange) * (kK1 * kDynamicRange);
    const double c2 = (kK2 * kDynamicRange) * (kK2 * kDynamicRange);
    double total = 0.0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int i = -kWindowRadius; i <= kWindowRadius; ++i)
                for (int j = -kWindowRadius; j <= kWindowRadius; ++j) {
                    const double wt = w[i + kWindowRadius] * w[j + kWindowRadius];
                    const double va = a.at(reflect(r + i, rows), reflect(c + j, cols));
                    const double vb = b.at(reflect(r + i, rows), reflect(c + j, cols));
                    mu_a += wt * va;
                    mu_b += wt * vb;
                    aa += wt * va * va;
                    bb += wt * vb * vb;
                    ab += wt * va * vb;
                }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
    return total / static_cast<double>(a.size());
}

namespace {

// Infinity (identical frames) is stored as the string "inf" since JSON has
// no representation for it.
nlohmann::json json_value(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

double value_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw std::runtime_error("quality report: unexpected string value");
    }
    return j.get<double>();
}

std::string csv_double(double v) {
    if (std::isinf(v)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string quality_report_json(const QualityReport& report) {
    nlohmann::json j;
    j["frame_psnr"] = nlohmann::json::array();
    j["frame_ssim"] = nlohmann::json::array();
    for (double v : report.frame_psnr) j["frame_psnr"].push_back(json_value(v));
    for (double v : report.frame_ssim) j["frame_ssim"].push_back(json_value(v));
    j["mean_psnr"] = json_value(report.mean_psnr);
    j["mean_ssim"] = json_value(report.mean_ssim);
    return j.dump(2);
}

QualityReport quality_report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    QualityReport rep;
    for (const auto& v : j.at("frame_psnr")) rep.frame_psnr.push_back(value_from_json(v));
    for (const auto& v : j.at("frame_ssim")) rep.frame_ssim.push_back(value_from_json(v));
    rep.mean_psnr = value_from_json(j.at("mean_psnr"));
    rep.mean_ssim = value_from_json(j.at("mean_ssim"));
    return rep;
}

void write_quality_report_csv(const QualityReport& report, std::ostream& out) {
    out << "frame,psnr,ssim\n";
    for (std::size_t i = 0; i < report.frame_psnr.size(); ++i)
        out << i << ',' << csv_double(report.frame_psnr[i]) << ','
            << csv_double(report.frame_ssim[i]) << '\n';
    out << "mean," << csv_double(report.mean_psnr) << ',' << csv_double(report.mean_ssim) << '\n';
}

Measurement extract_frame(const VideoCube& cube, int t) {
    Measurement f(cube.rows, cube.cols);
    for (int r = 0; r < cube.rows; ++r)
        for (int c = 0; c < cube.cols; ++c) f.at(r, c) = cube.at(r, c, t);
    return f;
}

QualityReport video_report(const VideoCube& x_hat, const VideoCube& truth) {
    if (!x_hat.same_dims(truth)) throw std::invalid_argument("video_report: cube dims differ");
    QualityReport rep;
    for (int t = 0; t < x_hat.frames; ++t) {
        const Measurement fa = extract_frame(x_hat, t);
        const Measurement fb = extract_frame(truth, t);
        rep.frame_psnr.push_back(psnr(fa, fb));
        rep.frame_ssim.push_back(ssim(fa, fb));
        rep.mean_psnr += rep.frame_psnr.back();
        rep.mean_ssim += rep.frame_ssim.back();
    }
    rep.mean_psnr /= static_cast<double>(x_hat.frames);
    rep.mean_ssim /= static_cast<double>(x_hat.frames);
    return rep;
}

} // namespace sci
