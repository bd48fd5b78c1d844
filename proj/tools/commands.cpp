#include "commands.hpp"

#include "gcmvs/error.hpp"
#include "gcmvs/evaluation.hpp"
#include "gcmvs/fusion.hpp"
#include "gcmvs/gc_penalty.hpp"
#include "gcmvs/hypotheses.hpp"
#include "gcmvs/io.hpp"
#include "gcmvs/loss.hpp"
#include "gcmvs/reprojection.hpp"
#include "gcmvs/summation.hpp"
#include "gcmvs/synthetic.hpp"
#include "gcmvs/text.hpp"
#include "gcmvs/view_selection.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <stdexcept>

namespace gcmvs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class MissingInput : public std::runtime_error
{
public:
    explicit MissingInput(const fs::path& path) : std::runtime_error("missing input: " + path.string()) {}
};

int default_threads()
{
    const char* env = std::getenv(kThreadsEnv);
    if (!env)
        return 1;
    const auto n = text::parse_int(env);
    return n && *n >= 1 && *n <= 1024 ? int(*n) : 1;
}

class InvalidInput : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Runs `load` and prefixes any parse error with the offending path.
template <class Load>
auto read_input(const fs::path& path, Load&& load)
{
    try {
        return load(path.string());
    } catch (const ParseError& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

PfmImage read_pfm_file(const fs::path& path)
{
    return read_input(path, [](const std::string& p) { return load_pfm(p); });
}

void require_file(const fs::path& path)
{
    if (!fs::is_regular_file(path))
        throw MissingInput(path);
}

void require_dir(const fs::path& path)
{
    if (!fs::is_directory(path))
        throw MissingInput(path);
}

void require_positive(double v, const char* flag)
{
    if (!(v > 0.0))
        throw UsageError(std::string(flag) + " must be > 0");
}

std::string view_stem(int id)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08d", id);
    return buf;
}

fs::path cam_path(const fs::path& scene, int id) { return scene / "cams" / (view_stem(id) + "_cam.txt"); }
fs::path map_path(const fs::path& dir, int id) { return dir / (view_stem(id) + ".pfm"); }

void write_json(const fs::path& path, const json& j)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    text::write_file(path.string(), j.dump(2) + "\n");
}

void emit(std::ostream& out, const std::string& out_path, const json& report)
{
    if (!out_path.empty())
        write_json(out_path, report);
    out << report.dump(2) << "\n";
}

/// Pairing and cameras of a scene directory, checked upfront.
struct Scene
{
    fs::path root;
    std::vector<ViewPairing> pairs;  // indexed by view id
    std::vector<CameraD> cameras;

    int size() const { return int(cameras.size()); }

    std::vector<int> sources(int view, int max_sources) const
    {
        const auto& ranked = pairs[std::size_t(view)];
        return ranked.top(max_sources > 0 ? std::size_t(max_sources) : ranked.ranked_sources.size());
    }
};

Scene open_scene(const fs::path& root)
{
    require_dir(root);
    require_file(root / "pair.txt");
    auto parsed = read_input(root / "pair.txt", [](const std::string& p) { return load_pairing(p); });
    Scene scene;
    scene.root = root;
    scene.pairs.resize(parsed.size());
    std::vector<bool> seen(parsed.size(), false);
    for (auto& p : parsed) {
        if (p.reference < 0 || std::size_t(p.reference) >= parsed.size() || seen[std::size_t(p.reference)])
            throw ParseError("view ids in pair.txt must be 0.." + std::to_string(parsed.size() - 1), 1,
                             ParseError::Unit::Line);
        seen[std::size_t(p.reference)] = true;
        scene.pairs[std::size_t(p.reference)] = std::move(p);
    }
    for (int v = 0; v < int(parsed.size()); ++v)
        require_file(cam_path(root, v));
    for (int v = 0; v < int(parsed.size()); ++v)
        scene.cameras.push_back(read_input(cam_path(root, v), [](const std::string& p) { return load_cam(p); }));
    return scene;
}

std::vector<DepthMap> load_depths(const fs::path& dir, int count)
{
    require_dir(dir);
    for (int v = 0; v < count; ++v)
        require_file(map_path(dir, v));
    std::vector<DepthMap> out;
    for (int v = 0; v < count; ++v)
        out.push_back(depth_from_pfm(read_pfm_file(map_path(dir, v))));
    return out;
}

// --- synth ------------------------------------------------------------------

struct SynthOptions
{
    std::string preset = "plane";
    int views = 5;
    int width = 160;
    int height = 128;
    std::uint64_t seed = 0;
    double noise = 0.0;
    int num_src = 0;
    std::string out;
};

int cmd_synth(const SynthOptions& o, std::ostream& out)
{
    if (o.views < 2 || o.width < 2 || o.height < 2)
        throw UsageError("synth needs --views >= 2 and an image of at least 2x2 pixels");
    if (!(o.noise >= 0.0))
        throw UsageError("--noise must be >= 0");
    SceneSpec spec = make_scene(parse_preset(o.preset), o.width, o.height, o.views, o.seed);
    SceneSpec exact = spec;
    spec.noise_stddev = o.noise;

    const fs::path root(o.out);
    fs::create_directories(root / "cams");
    fs::create_directories(root / "depths");
    fs::create_directories(root / "confidences");

    // Everything downstream sees the float32 depths, so the pairing and the
    // reference cloud are built from the stored values.
    std::vector<DepthMap> stored, stored_exact;
    for (int v = 0; v < o.views; ++v) {
        const DepthMap d = render_depth(spec, v);
        const PfmImage pfm = pfm_from_grid(d.masked_values());
        save_pfm(map_path(root / "depths", v).string(), pfm);
        save_pfm(map_path(root / "confidences", v).string(), pfm_from_grid(d.valid.cast<double>()));
        save_cam(cam_path(root, v).string(), spec.cameras[std::size_t(v)]);
        stored.push_back(depth_from_pfm(pfm));
        stored_exact.push_back(o.noise > 0.0 ? depth_from_pfm(pfm_from_grid(render_depth(exact, v).masked_values()))
                                             : stored.back());
    }

    const int stride = std::max(1, std::min(o.width, o.height) / 16);
    std::vector<ViewPairing> pairs;
    for (int v = 0; v < o.views; ++v) {
        std::vector<Point3> samples;
        const DepthMap& d = stored_exact[std::size_t(v)];
        for (Eigen::Index r = 0; r < d.height(); r += stride)
            for (Eigen::Index c = 0; c < d.width(); c += stride)
                if (d.valid(r, c))
                    samples.push_back(back_project(Pixel(double(c), double(r)), d.values(r, c),
                                                   spec.cameras[std::size_t(v)]));
        std::vector<Candidate> candidates;
        for (int s = 0; s < o.views; ++s)
            if (s != v)
                candidates.push_back({s, spec.cameras[std::size_t(s)]});
        ViewPairing p = rank_sources(v, spec.cameras[std::size_t(v)], candidates, samples);
        if (o.num_src > 0 && std::size_t(o.num_src) < p.ranked_sources.size())
            p.ranked_sources.resize(std::size_t(o.num_src));
        pairs.push_back(std::move(p));
    }
    save_pairing((root / "pair.txt").string(), pairs);

    const PointCloud gt = scene_point_cloud(stored_exact, spec.cameras);
    save_ply((root / "gt.ply").string(), gt);
    text::write_file((root / "spec.json").string(), scene_to_json(spec, o.preset) + "\n");

    emit(out, "",
         json{{"schema", "gcmvs.synth.v1"},
              {"scene", root.string()},
              {"preset", o.preset},
              {"views", o.views},
              {"width", o.width},
              {"height", o.height},
              {"gt_points", gt.size()}});
    return kExitOk;
}

// --- gc-penalty -------------------------------------------------------------

struct PenaltyOptions
{
    std::string scene;
    std::string depth_dir;
    std::string stage = "all";
    std::string range = "one-two";
    int num_src = 0;
    std::string out;
    int threads = 1;
};

json histogram_json(const std::map<double, long>& counts)
{
    json arr = json::array();
    for (const auto& [level, count] : counts)
        arr.push_back({{"level", level}, {"count", count}});
    return arr;
}

int cmd_gc_penalty(const PenaltyOptions& o, std::ostream& out)
{
    std::vector<int> stages;
    if (o.stage == "all")
        stages = {0, 1, 2};
    else if (o.stage == "0" || o.stage == "1" || o.stage == "2")
        stages = {o.stage[0] - '0'};
    else
        throw UsageError("--stage must be 0, 1, 2 or all");
    const RangeMode mode = o.range == "one-three" ? RangeMode::OneThree : RangeMode::OneTwo;

    const Scene scene = open_scene(o.scene);
    const fs::path depth_dir = o.depth_dir.empty() ? scene.root / "depths" : fs::path(o.depth_dir);
    const auto depths = load_depths(depth_dir, scene.size());
    const fs::path root(o.out);

    json report{{"schema", "gcmvs.gc_penalty.v1"}, {"range", o.range}, {"stages", json::array()}};
    for (int s : stages) {
        const GcThresholds thr = kStageThresholds[std::size_t(s)];
        const fs::path stage_dir = root / ("stage" + std::to_string(s));
        fs::create_directories(stage_dir);
        std::map<double, long> stage_counts;
        CompensatedSum stage_sum;
        long stage_pixels = 0;
        json views = json::array();
        for (int v = 0; v < scene.size(); ++v) {
            std::vector<View> sources;
            for (int id : scene.sources(v, o.num_src))
                sources.push_back({depths[std::size_t(id)], scene.cameras[std::size_t(id)]});
            const DepthMap& ref = depths[std::size_t(v)];
            const PenaltyMap penalty = apply_reference_mask(
                per_pixel_penalty(ref, scene.cameras[std::size_t(v)], sources, thr, mode, o.threads), ref.valid);
            save_pfm(map_path(stage_dir, v).string(), pfm_from_grid(penalty.values));

            const std::vector<long> hist = level_histogram(penalty, ref.valid);
            CompensatedSum sum;
            long pixels = 0;
            json levels = json::array();
            for (int k = 0; k <= penalty.m; ++k) {
                const double level = penalty_level(k, penalty.m, mode);
                levels.push_back({{"k", k}, {"level", level}, {"count", hist[std::size_t(k)]}});
                stage_counts[level] += hist[std::size_t(k)];
                pixels += hist[std::size_t(k)];
            }
            for (Eigen::Index r = 0; r < ref.height(); ++r)
                for (Eigen::Index c = 0; c < ref.width(); ++c)
                    if (ref.valid(r, c)) {
                        sum.add(penalty.values(r, c));
                        stage_sum.add(penalty.values(r, c));
                    }
            stage_pixels += pixels;
            views.push_back({{"view", v},
                             {"m", penalty.m},
                             {"pixels", pixels},
                             {"mean_penalty", pixels ? sum.value() / double(pixels) : 0.0},
                             {"histogram", levels}});
        }
        report["stages"].push_back({{"stage", s},
                                    {"d_pixel", thr.d_pixel},
                                    {"d_depth", thr.d_depth},
                                    {"pixels", stage_pixels},
                                    {"mean_penalty", stage_pixels ? stage_sum.value() / double(stage_pixels) : 0.0},
                                    {"histogram", histogram_json(stage_counts)},
                                    {"views", views}});
    }
    write_json(root / "gc_summary.json", report);
    out << report.dump(2) << "\n";
    return kExitOk;
}

// --- fuse -------------------------------------------------------------------

struct FuseOptions
{
    std::string scene;
    std::string depth_dir;
    std::string conf_dir;
    std::string mode = "fusibile";
    double disp_thresh = 0.25;
    double depth_tol = 0.01;
    double prob_thresh = 0.5;
    int num_consistent = 3;
    std::string aggregate = "mean";
    int num_src = 0;
    bool ascii = false;
    std::string out;
    int threads = 1;
};

int cmd_fuse(const FuseOptions& o, std::ostream& out)
{
    FusionParams params;
    params.mode = o.mode == "dynamic" ? FusionMode::Dynamic : FusionMode::Fusibile;
    params.disparity_threshold = o.disp_thresh;
    params.relative_depth_tol = o.depth_tol;
    params.prob_threshold = o.prob_thresh;
    params.consistency_threshold = o.num_consistent;
    params.aggregate = o.aggregate == "median" ? DepthAggregate::Median : DepthAggregate::Mean;
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const Scene scene = open_scene(o.scene);
    const fs::path depth_dir = o.depth_dir.empty() ? scene.root / "depths" : fs::path(o.depth_dir);
    const fs::path conf_dir = o.conf_dir.empty() ? scene.root / "confidences" : fs::path(o.conf_dir);
    require_dir(conf_dir);
    for (int v = 0; v < scene.size(); ++v)
        require_file(map_path(conf_dir, v));
    auto depths = load_depths(depth_dir, scene.size());

    std::vector<FusionView> views;
    std::vector<std::vector<int>> sources;
    for (int v = 0; v < scene.size(); ++v) {
        views.push_back({std::move(depths[std::size_t(v)]),
                         grid_from_pfm(read_pfm_file(map_path(conf_dir, v))), scene.cameras[std::size_t(v)], {}});
        sources.push_back(scene.sources(v, o.num_src));
    }
    const PointCloud cloud = fuse(views, params, sources, o.threads);
    save_ply(o.out, cloud, o.ascii ? PlyFormat::Ascii : PlyFormat::BinaryLittleEndian);
    emit(out, "",
         json{{"schema", "gcmvs.fuse.v1"}, {"output", o.out}, {"points", cloud.size()}, {"mode", o.mode}});
    return kExitOk;
}

// --- eval-pc / eval-depth ---------------------------------------------------

struct EvalPcOptions
{
    std::string pred;
    std::string gt;
    double max_dist = 0.0;
    std::string out;
    int threads = 1;
};

int cmd_eval_pc(const EvalPcOptions& o, std::ostream& out)
{
    require_positive(o.max_dist, "--max-dist");
    require_file(o.pred);
    require_file(o.gt);
    const auto ply = [](const std::string& p) { return load_ply(p); };
    const PointCloud pred = read_input(o.pred, ply);
    const PointCloud gt = read_input(o.gt, ply);
    const PointCloudMetrics m = evaluate_point_clouds(pred, gt, o.max_dist, o.threads);
    emit(out, o.out,
         json{{"schema", "gcmvs.eval_pc.v1"},
              {"accuracy", m.accuracy},
              {"completeness", m.completeness},
              {"overall", m.overall},
              {"max_dist", m.max_dist},
              {"pred_points", pred.size()},
              {"gt_points", gt.size()},
              {"accuracy_measured", m.accuracy_measured},
              {"completeness_measured", m.completeness_measured}});
    return kExitOk;
}

struct EvalDepthOptions
{
    std::string pred_dir;
    std::string gt_dir;
    std::string out;
};

int cmd_eval_depth(const EvalDepthOptions& o, std::ostream& out)
{
    require_dir(o.gt_dir);
    require_dir(o.pred_dir);
    std::vector<fs::path> names;
    for (const auto& entry : fs::directory_iterator(o.gt_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pfm")
            names.push_back(entry.path().filename());
    std::sort(names.begin(), names.end());
    if (names.empty())
        throw MissingInput(fs::path(o.gt_dir) / "*.pfm");
    for (const auto& n : names)
        require_file(fs::path(o.pred_dir) / n);

    json per_view = json::array();
    CompensatedSum epe, e1, e3;
    std::size_t pixels = 0;
    for (const auto& n : names) {
        const DepthMap gt = depth_from_pfm(read_pfm_file((fs::path(o.gt_dir) / n)));
        const DepthMap pred = depth_from_pfm(read_pfm_file((fs::path(o.pred_dir) / n)));
        if (pred.height() != gt.height() || pred.width() != gt.width())
            throw ComputeError("depth map " + n.string() + " differs in size from its ground truth");
        const DepthMetrics m = depth_metrics(pred, gt, gt.valid && pred.valid);
        const double w = double(m.pixels);
        epe.add(m.epe * w);
        e1.add(m.e1 * w);
        e3.add(m.e3 * w);
        pixels += m.pixels;
        per_view.push_back({{"file", n.string()}, {"epe", m.epe}, {"e1", m.e1}, {"e3", m.e3}, {"pixels", m.pixels}});
    }
    const double total = double(pixels);
    emit(out, o.out,
         json{{"schema", "gcmvs.eval_depth.v1"},
              {"epe", epe.value() / total},
              {"e1", e1.value() / total},
              {"e3", e3.value() / total},
              {"pixels", pixels},
              {"views", per_view}});
    return kExitOk;
}

// --- warp -------------------------------------------------------------------

struct WarpOptions
{
    std::string scene;
    std::string depth_dir;
    int ref = 0;
    int src = 1;
    std::string out;
    int threads = 1;
};

int cmd_warp(const WarpOptions& o, std::ostream& out)
{
    const Scene scene = open_scene(o.scene);
    if (o.ref < 0 || o.src < 0 || o.ref >= scene.size() || o.src >= scene.size() || o.ref == o.src)
        throw UsageError("--ref and --src must be distinct view ids below " + std::to_string(scene.size()));
    const fs::path depth_dir = o.depth_dir.empty() ? scene.root / "depths" : fs::path(o.depth_dir);
    require_file(map_path(depth_dir, o.ref));
    require_file(map_path(depth_dir, o.src));
    const DepthMap d_ref = depth_from_pfm(read_pfm_file(map_path(depth_dir, o.ref)));
    const DepthMap d_src = depth_from_pfm(read_pfm_file(map_path(depth_dir, o.src)));
    const Reprojection rp = fbr(d_ref, scene.cameras[std::size_t(o.ref)], d_src, scene.cameras[std::size_t(o.src)],
                                o.threads);

    Grid pde = Grid::Zero(d_ref.height(), d_ref.width());
    Grid rdd = Grid::Zero(d_ref.height(), d_ref.width());
    double max_pde = 0.0, max_rdd = 0.0;
    long valid = 0;
    for (Eigen::Index r = 0; r < d_ref.height(); ++r)
        for (Eigen::Index c = 0; c < d_ref.width(); ++c) {
            if (!rp.depth.valid(r, c))
                continue;
            pde(r, c) = std::hypot(rp.pixels.x(r, c) - double(c), rp.pixels.y(r, c) - double(r));
            rdd(r, c) = std::abs(rp.depth.values(r, c) - d_ref.values(r, c)) / d_ref.values(r, c);
            max_pde = std::max(max_pde, pde(r, c));
            max_rdd = std::max(max_rdd, rdd(r, c));
            ++valid;
        }
    const fs::path root(o.out);
    fs::create_directories(root);
    save_pfm((root / "depth.pfm").string(), pfm_from_grid(rp.depth.masked_values()));
    save_pfm((root / "pde.pfm").string(), pfm_from_grid(pde));
    save_pfm((root / "rdd.pfm").string(), pfm_from_grid(rdd));
    save_pfm((root / "valid.pfm").string(), pfm_from_grid(rp.depth.valid.cast<double>()));
    emit(out, (root / "warp.json").string(),
         json{{"schema", "gcmvs.warp.v1"},
              {"ref", o.ref},
              {"src", o.src},
              {"valid_pixels", valid},
              {"max_pde", max_pde},
              {"max_rdd", max_rdd}});
    return kExitOk;
}

// --- loss -------------------------------------------------------------------

struct LossOptions
{
    std::vector<std::string> volumes;
    std::vector<std::string> gts;
    std::vector<std::string> penalties;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 2.0;
    std::string out;
};

int cmd_loss(const LossOptions& o, std::ostream& out)
{
    if (o.volumes.empty() || o.volumes.size() > 3)
        throw UsageError("give one to three --volume files, one per stage");
    if (o.gts.size() != o.volumes.size())
        throw UsageError("give one --gt per --volume");
    if (!o.penalties.empty() && o.penalties.size() != o.volumes.size())
        throw UsageError("give either no --penalty or one per --volume");
    for (const auto* list : {&o.volumes, &o.gts, &o.penalties})
        for (const auto& p : *list)
            require_file(p);

    std::array<double, 3> losses{0.0, 0.0, 0.0};
    json stages = json::array();
    for (std::size_t s = 0; s < o.volumes.size(); ++s) {
        const ProbabilityVolume vol = read_input(o.volumes[s], [](const std::string& p) { return load_volume(p); });
        const DepthMap gt = depth_from_pfm(read_pfm_file(o.gts[s]));
        const ErrorMap err = cross_entropy_error(vol, gt);
        const Grid penalty = o.penalties.empty() ? Grid::Ones(err.values.rows(), err.values.cols())
                                                 : grid_from_pfm(read_pfm_file(o.penalties[s]));
        losses[s] = stage_loss(penalty, err.values, err.valid);
        stages.push_back({{"stage", s}, {"loss", losses[s]}, {"pixels", err.valid.count()}});
    }
    const StageWeights w{o.alpha, o.beta, o.gamma};
    emit(out, o.out,
         json{{"schema", "gcmvs.loss.v1"},
              {"stages", stages},
              {"weights", {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}}},
              {"total", total_loss(losses, w)}});
    return kExitOk;
}

// --- hypotheses -------------------------------------------------------------

struct HypothesesOptions
{
    std::string config;
    std::string dirs;
    double depth_interval = 0.0;
    std::vector<double> centers;
    std::string out;
};

int cmd_hypotheses(const HypothesesOptions& o, std::ostream& out)
{
    require_positive(o.depth_interval, "--depth-interval");
    StageConfig cfg;
    if (!o.config.empty()) {
        require_file(o.config);
        try {
            cfg = StageConfig::from_json(text::read_file(o.config));
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad stage config: ") + e.what(), 1, ParseError::Unit::Line);
        }
    }
    if (o.dirs == "train")
        std::copy(kTrainIntervalRatios.begin(), kTrainIntervalRatios.end(), cfg.depth_interval_ratio.begin());
    else if (o.dirs == "test")
        std::copy(kTestIntervalRatios.begin(), kTestIntervalRatios.end(), cfg.depth_interval_ratio.begin());
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    json stages = json::array();
    for (int s = 0; s < 3; ++s)
        stages.push_back({{"stage", s},
                          {"num_hypotheses", cfg.num_hypotheses[std::size_t(s)]},
                          {"depth_interval_ratio", cfg.depth_interval_ratio[std::size_t(s)]},
                          {"pixel_interval", pixel_interval(cfg.depth_interval_ratio[std::size_t(s)], o.depth_interval)},
                          {"band_width", band_width(cfg, s, o.depth_interval)}});
    json bands = json::array();
    for (double center : o.centers)
        for (int s = 1; s < 3; ++s)
            bands.push_back({{"center", center}, {"stage", s}, {"values", refine_band(center, s, cfg, o.depth_interval)}});
    emit(out, o.out,
         json{{"schema", "gcmvs.hypotheses.v1"},
              {"config", json::parse(cfg.to_json())},
              {"depth_interval", o.depth_interval},
              {"coarse", coarse_hypotheses(cfg)},
              {"stages", stages},
              {"bands", bands}});
    return kExitOk;
}

CLI::Option* add_threads(CLI::App* sub, int& threads)
{
    threads = default_threads();
    return sub->add_option("--threads", threads, "Worker threads (default from " + std::string(kThreadsEnv) + ")")
        ->check(CLI::Range(1, 1024));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Geometric-consistency MVS toolkit", "gcmvs"};
    app.require_subcommand(1, 1);
    app.failure_message(CLI::FailureMessage::help);
    const std::vector<std::string> choice_range{"one-two", "one-three"};

    SynthOptions synth;
    auto* s_synth = app.add_subcommand("synth", "Render an analytic scene into a scene directory");
    s_synth->add_option("--preset,--scene", synth.preset, "Scene preset")
        ->check(CLI::IsMember({"plane", "dolly-plane", "tilted-plane", "sphere", "two-planes", "two-planes-offset"}))
        ->capture_default_str();
    s_synth->add_option("--views", synth.views, "Number of cameras")->capture_default_str();
    s_synth->add_option("--width", synth.width, "Image width")->capture_default_str();
    s_synth->add_option("--height", synth.height, "Image height")->capture_default_str();
    s_synth->add_option("--seed", synth.seed, "Seed for rig jitter and noise")->capture_default_str();
    s_synth->add_option("--noise", synth.noise, "Additive Gaussian depth noise (scene units)")->capture_default_str();
    s_synth->add_option("--num-src", synth.num_src, "Sources kept per view in pair.txt (0: all)")->capture_default_str();
    s_synth->add_option("--out", synth.out, "Output scene directory")->required();
    int synth_threads = 1;
    add_threads(s_synth, synth_threads);

    PenaltyOptions pen;
    auto* s_pen = app.add_subcommand("gc-penalty", "Per-pixel geometric-consistency penalty maps");
    s_pen->add_option("--scene", pen.scene, "Scene directory")->required();
    s_pen->add_option("--depth-dir", pen.depth_dir, "Depth maps to check (default <scene>/depths)");
    s_pen->add_option("--stage", pen.stage, "Threshold set: 0, 1, 2 or all")->capture_default_str();
    s_pen->add_option("--range", pen.range, "Penalty range")->check(CLI::IsMember(choice_range))->capture_default_str();
    s_pen->add_option("--num-src", pen.num_src, "Source views per reference (0: all in pair.txt)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s_pen->add_option("--out", pen.out, "Output directory")->required();
    add_threads(s_pen, pen.threads);

    FuseOptions fuse_opt;
    auto* s_fuse = app.add_subcommand("fuse", "Fuse depth maps into a PLY point cloud");
    s_fuse->add_option("--scene", fuse_opt.scene, "Scene directory")->required();
    s_fuse->add_option("--depth-dir", fuse_opt.depth_dir, "Depth maps (default <scene>/depths)");
    s_fuse->add_option("--conf-dir", fuse_opt.conf_dir, "Confidence maps (default <scene>/confidences)");
    s_fuse->add_option("--mode", fuse_opt.mode, "Consistency test")
        ->check(CLI::IsMember({"fusibile", "dynamic"}))
        ->capture_default_str();
    s_fuse->add_option("--disp-thresh", fuse_opt.disp_thresh, "Reprojection displacement limit (px)")
        ->capture_default_str();
    s_fuse->add_option("--depth-tol", fuse_opt.depth_tol, "Relative depth limit")->capture_default_str();
    s_fuse->add_option("--prob-thresh", fuse_opt.prob_thresh, "Fuse pixels with confidence above this")
        ->capture_default_str();
    s_fuse->add_option("--num-consistent", fuse_opt.num_consistent, "Minimum consistent source views")
        ->capture_default_str();
    s_fuse->add_option("--aggregate", fuse_opt.aggregate, "Fused depth")
        ->check(CLI::IsMember({"mean", "median"}))
        ->capture_default_str();
    s_fuse->add_option("--num-src", fuse_opt.num_src, "Source views per reference (0: all in pair.txt)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s_fuse->add_flag("--ascii", fuse_opt.ascii, "Write ASCII instead of binary PLY");
    s_fuse->add_option("--out", fuse_opt.out, "Output PLY file")->required();
    add_threads(s_fuse, fuse_opt.threads);

    EvalPcOptions epc;
    auto* s_epc = app.add_subcommand("eval-pc", "Accuracy and completeness of a point cloud");
    s_epc->add_option("--pred", epc.pred, "Predicted PLY")->required();
    s_epc->add_option("--gt", epc.gt, "Ground-truth PLY")->required();
    s_epc->add_option("--max-dist", epc.max_dist, "Distances above this are excluded")->required();
    s_epc->add_option("--out", epc.out, "Also write the JSON report here");
    add_threads(s_epc, epc.threads);

    EvalDepthOptions edp;
    auto* s_edp = app.add_subcommand("eval-depth", "EPE, e1 and e3 of depth maps against ground truth");
    s_edp->add_option("--pred-dir", edp.pred_dir, "Predicted depth PFMs")->required();
    s_edp->add_option("--gt-dir", edp.gt_dir, "Ground-truth depth PFMs (matched by file name)")->required();
    s_edp->add_option("--out", edp.out, "Also write the JSON report here");
    int edp_threads = 1;
    add_threads(s_edp, edp_threads);

    WarpOptions warp;
    auto* s_warp = app.add_subcommand("warp", "Forward-backward reprojection of one view pair");
    s_warp->add_option("--scene", warp.scene, "Scene directory")->required();
    s_warp->add_option("--depth-dir", warp.depth_dir, "Depth maps (default <scene>/depths)");
    s_warp->add_option("--ref", warp.ref, "Reference view id")->required();
    s_warp->add_option("--src", warp.src, "Source view id")->required();
    s_warp->add_option("--out", warp.out, "Output directory")->required();
    add_threads(s_warp, warp.threads);

    LossOptions loss;
    auto* s_loss = app.add_subcommand("loss", "Penalty-weighted cross-entropy loss");
    s_loss->add_option("--volume", loss.volumes, "Probability volume per stage")->required();
    s_loss->add_option("--gt", loss.gts, "Ground-truth depth PFM per stage")->required();
    s_loss->add_option("--penalty", loss.penalties, "Penalty PFM per stage (default all ones)");
    s_loss->add_option("--alpha", loss.alpha, "Stage 1 weight")->capture_default_str();
    s_loss->add_option("--beta", loss.beta, "Stage 2 weight")->capture_default_str();
    s_loss->add_option("--gamma", loss.gamma, "Stage 3 weight")->capture_default_str();
    s_loss->add_option("--out", loss.out, "Also write the JSON report here");
    int loss_threads = 1;
    add_threads(s_loss, loss_threads);

    HypothesesOptions hyp;
    auto* s_hyp = app.add_subcommand("hypotheses", "Depth hypotheses for a stage configuration");
    s_hyp->add_option("--config", hyp.config, "Stage configuration JSON");
    s_hyp->add_option("--dirs", hyp.dirs, "Interval ratio preset")->check(CLI::IsMember({"train", "test"}));
    s_hyp->add_option("--depth-interval", hyp.depth_interval, "Base depth interval")->required();
    s_hyp->add_option("--center", hyp.centers, "Print the refinement bands around these depths");
    s_hyp->add_option("--out", hyp.out, "Also write the JSON report here");
    int hyp_threads = 1;
    add_threads(s_hyp, hyp_threads);

    std::vector<const char*> argv{"gcmvs"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s_synth->parsed())
            return cmd_synth(synth, out);
        if (s_pen->parsed())
            return cmd_gc_penalty(pen, out);
        if (s_fuse->parsed())
            return cmd_fuse(fuse_opt, out);
        if (s_epc->parsed())
            return cmd_eval_pc(epc, out);
        if (s_edp->parsed())
            return cmd_eval_depth(edp, out);
        if (s_warp->parsed())
            return cmd_warp(warp, out);
        if (s_loss->parsed())
            return cmd_loss(loss, out);
        if (s_hyp->parsed())
            return cmd_hypotheses(hyp, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help() << "\n";
        return kExitUsage;
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const InvalidInput& e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const ParseError& e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitCompute;
    }
    return kExitUsage;
}

} // namespace gcmvs::cli
