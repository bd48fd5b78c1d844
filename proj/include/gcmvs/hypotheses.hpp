#pragma once

// Coarse-to-fine plane-sweep depth hypotheses.

#include "gcmvs/camera.hpp"
#include "gcmvs/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace gcmvs {

struct StageConfig
{
    std::array<int, 3> num_hypotheses{48, 32, 8};
    std::array<double, 3> depth_interval_ratio{2.0, 0.8, 0.4};
    double depth_min = 425.0;
    double depth_max = 935.0;

    void validate() const;

    /// Keys: "num_hypotheses" (3 ints), "depth_interval_ratio" (3 numbers),
    /// "depth_min", "depth_max". Missing keys keep their defaults.
    static StageConfig from_json(const std::string& text);
    std::string to_json() const;
};

inline constexpr std::array<double, 3> kTrainIntervalRatios{2.0, 0.8, 0.4};
inline constexpr std::array<double, 3> kTestIntervalRatios{1.6, 0.7, 0.3};

/// Spacing between neighboring hypothesis planes at one stage.
double pixel_interval(double dir_stage, double depth_interval);

/// `count` values from `lo` to `hi` inclusive, uniformly spaced, with both
/// endpoints exact.
std::vector<double> uniform_hypotheses(double lo, double hi, int count);

/// Stage-0 sweep over [cfg.depth_min, cfg.depth_max].
std::vector<double> coarse_hypotheses(const StageConfig& cfg);

/// Stage-0 sweep starting at cam.depth_min and spanning
/// (num_hypotheses[0] - 1) * pixel_interval(dir[0], cam.depth_interval).
std::vector<double> coarse_hypotheses(const StageConfig& cfg, const CameraD& cam);

/// Width (first to last plane) of a stage band.
double band_width(const StageConfig& cfg, int stage, double depth_interval);

/// Per-pixel band for stage 1 or 2: num_hypotheses[stage] planes with spacing
/// pixel_interval(dir[stage], depth_interval), centered on prev_depth. A band
/// crossing [depth_min, depth_max] is shifted back inside; a band wider than
/// the range becomes the uniform sweep over the range. Invalid pixels get the
/// uniform sweep. Returns one H x W slice per plane.
std::vector<Grid> refine_hypotheses(const DepthMap& prev_depth, int stage, const StageConfig& cfg,
                                    double depth_interval);

/// The band for a single center value.
std::vector<double> refine_band(double center, int stage, const StageConfig& cfg, double depth_interval);

} // namespace gcmvs
