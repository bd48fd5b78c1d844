#pragma once

// Depth-map fusion into a point cloud. A reference pixel is fused when its
// confidence clears the probability gate and enough source views agree with
// it geometrically under forward-backward reprojection.

#include "gcmvs/camera.hpp"
#include "gcmvs/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace gcmvs {

enum class FusionMode { Fusibile, Dynamic };
enum class DepthAggregate { Mean, Median };

/// (pixel displacement, relative depth) limits for each required view count
/// k = 1, 2, ...; counts past the end use the last entry.
using DynamicTable = std::vector<std::pair<double, double>>;

/// k * (0.25 px, 0.0025) for k = 1..10.
DynamicTable default_dynamic_table();

std::pair<double, double> dynamic_thresholds(int num_required, const DynamicTable& table = default_dynamic_table());

struct FusionParams
{
    FusionMode mode = FusionMode::Fusibile;
    double disparity_threshold = 0.25;  // pixels, Fusibile only
    double relative_depth_tol = 0.01;   // Fusibile only
    double prob_threshold = 0.5;        // fuse when confidence > prob_threshold
    int consistency_threshold = 3;      // minimum consistent source views
    DepthAggregate aggregate = DepthAggregate::Mean;
    DynamicTable dynamic_table = default_dynamic_table();
    std::vector<int> reference_views;   // empty: every view, in index order

    void validate() const;
};

struct FusionView
{
    DepthMap depth;
    Grid confidence;
    CameraD camera;
    std::vector<Rgb> color;  // empty or H * W row-major
};

/// Fuses `views`. `sources[v]` lists the source views checked against view v
/// (empty outer vector: every other view). Points are emitted in reference
/// view order, then row-major pixel order.
///
/// A source pixel that an earlier reference pixel warps onto consistently is
/// consumed and never emitted itself. Consumption uses only geometry (the
/// Fusibile thresholds, or the k = 1 dynamic entry) so that the output size is
/// monotone in prob_threshold and consistency_threshold.
PointCloud fuse(const std::vector<FusionView>& views, const FusionParams& params,
                const std::vector<std::vector<int>>& sources = {}, int threads = 1);

} // namespace gcmvs
