#include "gcmvs/hypotheses.hpp"

#include <json.hpp>

#include <stdexcept>

namespace gcmvs {

void StageConfig::validate() const
{
    for (int n : num_hypotheses)
        if (n < 2)
            throw std::invalid_argument("every stage needs at least two hypotheses");
    for (double r : depth_interval_ratio)
        if (!(r > 0.0))
            throw std::invalid_argument("depth interval ratios must be positive");
    if (!(depth_min > 0.0) || !(depth_max > depth_min))
        throw std::invalid_argument("depth range must satisfy depth_max > depth_min > 0");
}

StageConfig StageConfig::from_json(const std::string& text)
{
    StageConfig cfg;
    const auto j = nlohmann::json::parse(text);
    if (j.contains("num_hypotheses"))
        cfg.num_hypotheses = j.at("num_hypotheses").get<std::array<int, 3>>();
    if (j.contains("depth_interval_ratio"))
        cfg.depth_interval_ratio = j.at("depth_interval_ratio").get<std::array<double, 3>>();
    if (j.contains("depth_min"))
        cfg.depth_min = j.at("depth_min").get<double>();
    if (j.contains("depth_max"))
        cfg.depth_max = j.at("depth_max").get<double>();
    cfg.validate();
    return cfg;
}

std::string StageConfig::to_json() const
{
    nlohmann::json j;
    j["num_hypotheses"] = num_hypotheses;
    j["depth_interval_ratio"] = depth_interval_ratio;
    j["depth_min"] = depth_min;
    j["depth_max"] = depth_max;
    return j.dump(2);
}

double pixel_interval(double dir_stage, double depth_interval)
{
    if (!(dir_stage > 0.0) || !(depth_interval > 0.0))
        throw std::invalid_argument("depth interval ratio and depth interval must be positive");
    return dir_stage * depth_interval;
}

std::vector<double> uniform_hypotheses(double lo, double hi, int count)
{
    if (count < 2 || !(hi > lo))
        throw std::invalid_argument("uniform sweep needs count >= 2 and hi > lo");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double last = double(count - 1);
    for (int i = 0; i < count; ++i) {
        const double t = double(i) / last;
        out[std::size_t(i)] = lo * (1.0 - t) + hi * t;
    }
    return out;
}

std::vector<double> coarse_hypotheses(const StageConfig& cfg)
{
    cfg.validate();
    return uniform_hypotheses(cfg.depth_min, cfg.depth_max, cfg.num_hypotheses[0]);
}

std::vector<double> coarse_hypotheses(const StageConfig& cfg, const CameraD& cam)
{
    StageConfig derived = cfg;
    derived.depth_min = cam.depth_min;
    derived.depth_max = cam.depth_min + band_width(cfg, 0, cam.depth_interval);
    return coarse_hypotheses(derived);
}

double band_width(const StageConfig& cfg, int stage, double depth_interval)
{
    if (stage < 0 || stage > 2)
        throw std::invalid_argument("stage index must be 0, 1 or 2");
    const auto s = std::size_t(stage);
    return double(cfg.num_hypotheses[s] - 1) * pixel_interval(cfg.depth_interval_ratio[s], depth_interval);
}

std::vector<double> refine_band(double center, int stage, const StageConfig& cfg, double depth_interval)
{
    cfg.validate();
    if (stage != 1 && stage != 2)
        throw std::invalid_argument("refinement applies to stages 1 and 2; use coarse_hypotheses for stage 0");
    const auto s = std::size_t(stage);
    const int count = cfg.num_hypotheses[s];
    const double spacing = pixel_interval(cfg.depth_interval_ratio[s], depth_interval);
    const double width = double(count - 1) * spacing;
    if (width >= cfg.depth_max - cfg.depth_min)
        return uniform_hypotheses(cfg.depth_min, cfg.depth_max, count);

    double start = center - 0.5 * width;
    if (start < cfg.depth_min)
        start = cfg.depth_min;
    else if (start + width > cfg.depth_max)
        start = cfg.depth_max - width;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[std::size_t(i)] = start + double(i) * spacing;
    return out;
}

std::vector<Grid> refine_hypotheses(const DepthMap& prev_depth, int stage, const StageConfig& cfg,
                                    double depth_interval)
{
    prev_depth.check_shape();
    const auto fallback = refine_band(0.5 * (cfg.depth_min + cfg.depth_max), stage, cfg, depth_interval).size();
    const auto uniform = uniform_hypotheses(cfg.depth_min, cfg.depth_max, static_cast<int>(fallback));
    std::vector<Grid> planes(fallback, Grid(prev_depth.height(), prev_depth.width()));
    for (Eigen::Index r = 0; r < prev_depth.height(); ++r)
        for (Eigen::Index c = 0; c < prev_depth.width(); ++c) {
            const auto band = prev_depth.valid(r, c)
                                  ? refine_band(prev_depth.values(r, c), stage, cfg, depth_interval)
                                  : uniform;
            for (std::size_t d = 0; d < band.size(); ++d)
                planes[d](r, c) = band[d];
        }
    return planes;
}

} // namespace gcmvs
