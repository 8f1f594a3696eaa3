#include "scicli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sci/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scicli {

namespace {

std::string sample_name(const char* prefix, std::size_t index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04zu.%s", prefix, index, ext);
    return buf;
}

std::string resolve_path(const std::string& base_file, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_file).parent_path() / p).string();
}

void apply_json(RunConfig& cfg, const json& j) {
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (s.contains("variant"))
            cfg.solver.variant = sci::solver_variant_from_string(s["variant"].get<std::string>());
        if (s.contains("rho")) cfg.solver.rho = s["rho"].get<double>();
        if (s.contains("iterations")) cfg.solver.iterations = s["iterations"].get<int>();
        if (s.contains("record_trace")) cfg.solver.record_trace = s["record_trace"].get<bool>();
    }
    if (j.contains("denoiser")) {
        const json& d = j["denoiser"];
        if (d.contains("kind"))
            cfg.denoiser.kind = sci::denoiser_kind_from_string(d["kind"].get<std::string>());
        if (d.contains("radius")) cfg.denoiser.radius = d["radius"].get<int>();
        if (d.contains("kappa")) cfg.denoiser.kappa = d["kappa"].get<double>();
    }
    if (j.contains("schedule")) cfg.schedule = j["schedule"].get<std::string>();
    if (j.contains("manifest")) cfg.manifest = j["manifest"].get<std::string>();
    if (j.contains("recon_dir")) cfg.recon_dir = j["recon_dir"].get<std::string>();
    if (j.contains("videos")) cfg.videos = j["videos"].get<std::vector<std::string>>();
    if (j.contains("mask")) cfg.mask_path = j["mask"].get<std::string>();
    if (j.contains("mask_density")) cfg.mask_density = j["mask_density"].get<double>();
    if (j.contains("noise_std")) cfg.noise_std = j["noise_std"].get<double>();
    if (j.contains("prepare")) {
        const json& p = j["prepare"];
        if (p.contains("height")) cfg.prepare.target_height = p["height"].get<int>();
        if (p.contains("width")) cfg.prepare.target_width = p["width"].get<int>();
        if (p.contains("group")) cfg.prepare.group_frames = p["group"].get<int>();
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        if (t.contains("epochs")) cfg.epochs = t["epochs"].get<int>();
        if (t.contains("minibatch")) cfg.minibatch = t["minibatch"].get<int>();
        if (t.contains("checkpoint_segment"))
            cfg.checkpoint_segment = t["checkpoint_segment"].get<int>();
        if (t.contains("shuffle")) cfg.shuffle = t["shuffle"].get<bool>();
        if (t.contains("lr")) cfg.lr = t["lr"].get<double>();
    }
}

struct LoadedDataset {
    sci::MaskCube mask;
    std::vector<sci::Measurement> ys;
    std::vector<sci::VideoCube> truths; // empty cube (rows==0) when absent
    sci::DatasetManifest manifest;
};

LoadedDataset load_dataset(const std::string& manifest_path) {
    if (manifest_path.empty()) throw std::invalid_argument("no manifest configured");
    LoadedDataset ds;
    ds.manifest = sci::read_manifest(manifest_path);
    ds.mask = sci::read_mask(resolve_path(manifest_path, ds.manifest.mask_path));
    for (const auto& entry : ds.manifest.samples) {
        ds.ys.push_back(sci::read_measurement(resolve_path(manifest_path, entry.y_path)));
        if (!entry.truth_path.empty())
            ds.truths.push_back(sci::read_cube(resolve_path(manifest_path, entry.truth_path)));
        else
            ds.truths.emplace_back();
    }
    return ds;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(thread_cap()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string csv_double(double v) {
    if (std::isinf(v)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

int thread_cap() {
    if (const char* env = std::getenv("SCI_UNFOLD_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    RunConfig cfg;
    apply_json(cfg, json::parse(in));
    return cfg;
}

sci::NoiseSchedule resolve_schedule(const std::string& source, int iterations) {
    if (source == "step") return sci::schedule_step(iterations);
    if (source == "exponential") return sci::schedule_exponential(iterations);
    if (source == "constant") return sci::schedule_constant(iterations);
    std::ifstream in(source);
    if (!in) throw std::runtime_error("cannot open schedule file: " + source);
    json j = json::parse(in);
    sci::NoiseSchedule sched;
    const json& arr = j.is_array() ? j : j.at("sigma");
    for (const auto& v : arr) sched.sigmas.push_back(v.get<double>());
    if (static_cast<int>(sched.sigmas.size()) != iterations)
        throw std::runtime_error("schedule length " + std::to_string(sched.sigmas.size()) +
                                 " does not match iteration count " + std::to_string(iterations));
    for (double s : sched.sigmas)
        if (!(s > 0.0 && s < 1.0))
            throw std::runtime_error("schedule file: sigma values must be in (0, 1)");
    return sched;
}

void cmd_simulate(const RunConfig& cfg) {
    if (cfg.videos.empty()) throw std::invalid_argument("simulate: no videos configured");
    std::vector<sci::VideoCube> cubes;
    for (const std::string& src : cfg.videos) {
        if (fs::is_directory(src)) {
            std::vector<std::string> frame_paths;
            for (const auto& e : fs::directory_iterator(src))
                if (e.path().extension() == ".pgm") frame_paths.push_back(e.path().string());
            std::sort(frame_paths.begin(), frame_paths.end());
            if (frame_paths.empty())
                throw std::runtime_error("simulate: no .pgm frames in " + src);
            std::vector<sci::FrameImage> frames;
            for (const std::string& p : frame_paths) frames.push_back(sci::read_pgm(p));
            for (sci::VideoCube& c : sci::prepare_video(frames, cfg.prepare))
                cubes.push_back(std::move(c));
        } else {
            cubes.push_back(sci::read_cube(src));
        }
    }
    for (const sci::VideoCube& c : cubes)
        if (!c.same_dims(cubes.front()))
            throw std::runtime_error("simulate: input cubes differ in dimensions");

    sci::MaskCube mask =
        cfg.mask_path.empty()
            ? sci::generate_mask(cubes[0].rows, cubes[0].cols, cubes[0].frames, cfg.mask_density,
                                 cfg.seed)
            : sci::read_mask(cfg.mask_path);

    const std::vector<sci::DatasetSample> samples =
        sci::build_dataset(cubes, mask, cfg.noise_std, cfg.seed);

    fs::create_directories(cfg.out);
    sci::DatasetManifest manifest;
    manifest.mask_path = "mask.sci";
    manifest.noise_std = cfg.noise_std;
    manifest.seed = cfg.seed;
    sci::write_tensor((fs::path(cfg.out) / "mask.sci").string(), mask);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sci::DatasetManifest::Entry entry;
        entry.y_path = sample_name("y", i, "sci");
        entry.truth_path = sample_name("truth", i, "sci");
        sci::write_tensor((fs::path(cfg.out) / entry.y_path).string(), samples[i].y);
        sci::write_tensor((fs::path(cfg.out) / entry.truth_path).string(), samples[i].truth);
        manifest.samples.push_back(std::move(entry));
    }
    sci::write_manifest((fs::path(cfg.out) / "manifest.json").string(), manifest);
}

void cmd_reconstruct(const RunConfig& cfg) {
    LoadedDataset ds = load_dataset(cfg.manifest);
    const sci::SciOperator op(ds.mask);
    const sci::NoiseSchedule sched = resolve_schedule(cfg.schedule, cfg.solver.iterations);
    fs::create_directories(cfg.out);

    parallel_for(ds.ys.size(), [&](std::size_t i) {
        const sci::VideoCube* truth = ds.truths[i].rows > 0 ? &ds.truths[i] : nullptr;
        const sci::ReconResult res =
            sci::reconstruct(ds.ys[i], op, cfg.denoiser, sched, cfg.solver, truth);
        sci::write_tensor((fs::path(cfg.out) / sample_name("recon", i, "sci")).string(), res.x);
        if (cfg.solver.record_trace) {
            std::ofstream trace((fs::path(cfg.out) / sample_name("trace", i, "csv")).string());
            sci::write_trace_csv(res.trace, trace);
        }
        if (truth) {
            const sci::QualityReport rep = sci::video_report(res.x, *truth);
            json j = json::parse(sci::quality_report_json(rep));
            j["schedule"] = cfg.schedule;
            j["solver"] = sci::to_string(cfg.solver.variant);
            j["denoiser"] = sci::to_string(cfg.denoiser.kind);
            std::ofstream out((fs::path(cfg.out) / sample_name("report", i, "json")).string());
            out << j.dump(2) << '\n';
        }
    });
}

void cmd_train(const RunConfig& cfg) {
    LoadedDataset ds = load_dataset(cfg.manifest);
    std::vector<sci::TrainingSample> samples;
    for (std::size_t i = 0; i < ds.ys.size(); ++i) {
        if (ds.truths[i].rows == 0)
            throw std::runtime_error("train: sample " + std::to_string(i) + " has no ground truth");
        samples.push_back({ds.ys[i], ds.truths[i]});
    }
    const sci::SciOperator op(ds.mask);

    sci::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.minibatch = cfg.minibatch;
    tc.iterations = cfg.solver.iterations;
    tc.rho = cfg.solver.rho;
    tc.lr = cfg.lr;
    tc.variant = cfg.solver.variant;
    tc.denoiser = cfg.denoiser;
    tc.seed = cfg.seed;
    tc.checkpoint_segment = cfg.checkpoint_segment;
    tc.shuffle = cfg.shuffle;

    const sci::TrainResult result = sci::train(samples, op, tc);

    fs::create_directories(cfg.out);
    json sched;
    sched["sigma"] = result.schedule.sigmas().sigmas;
    sched["logits"] = result.schedule.logits;
    std::ofstream sched_out((fs::path(cfg.out) / "schedule.json").string());
    sched_out << sched.dump(2) << '\n';

    std::ofstream log_out((fs::path(cfg.out) / "loss_log.csv").string());
    log_out << "epoch,mean_loss\n";
    for (const sci::EpochLog& row : result.log)
        log_out << row.epoch << ',' << csv_double(row.mean_loss) << '\n';

    json meta;
    meta["initial_mean_loss"] = result.initial_mean_loss;
    meta["solver"] = sci::to_string(tc.variant);
    meta["denoiser"] = sci::to_string(tc.denoiser.kind);
    std::ofstream meta_out((fs::path(cfg.out) / "train_meta.json").string());
    meta_out << meta.dump(2) << '\n';
}

void cmd_eval(const RunConfig& cfg) {
    LoadedDataset ds = load_dataset(cfg.manifest);
    const std::string recon_dir = cfg.recon_dir.empty() ? cfg.out : cfg.recon_dir;
    fs::create_directories(cfg.out);
    std::ofstream summary((fs::path(cfg.out) / "eval_summary.csv").string());
    summary << "sample,psnr,ssim\n";
    for (std::size_t i = 0; i < ds.ys.size(); ++i) {
        if (ds.truths[i].rows == 0) continue;
        const sci::VideoCube recon =
            sci::read_cube((fs::path(recon_dir) / sample_name("recon", i, "sci")).string());
        const sci::QualityReport rep = sci::video_report(recon, ds.truths[i]);
        std::ofstream out((fs::path(cfg.out) / sample_name("eval_report", i, "json")).string());
        out << sci::quality_report_json(rep) << '\n';
        summary << i << ',' << csv_double(rep.mean_psnr) << ',' << csv_double(rep.mean_ssim)
                << '\n';
    }
}

void cmd_report(const std::vector<std::string>& report_paths, const std::string& out_csv) {
    if (report_paths.empty()) throw std::invalid_argument("report: no input files");
    std::string missing;
    for (const std::string& p : report_paths)
        if (!fs::exists(p)) missing += (missing.empty() ? "" : ", ") + p;
    if (!missing.empty()) throw std::runtime_error("report: missing input files: " + missing);

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("report: cannot open output: " + out_csv);
    out << "video,psnr,ssim\n";
    double sum_psnr = 0.0, sum_ssim = 0.0;
    for (const std::string& p : report_paths) {
        std::ifstream in(p);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const sci::QualityReport rep = sci::quality_report_from_json(text);
        out << fs::path(p).stem().string() << ',' << csv_double(rep.mean_psnr) << ','
            << csv_double(rep.mean_ssim) << '\n';
        sum_psnr += rep.mean_psnr;
        sum_ssim += rep.mean_ssim;
    }
    out << "average," << csv_double(sum_psnr / report_paths.size()) << ','
        << csv_double(sum_ssim / report_paths.size()) << '\n';
}

} // namespace scicli
