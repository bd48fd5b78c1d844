#pragma once

// Multi-view geometric consistency check. Each source view votes a pixel
// inconsistent when the forward-backward reprojection moves it by more than
// d_pixel pixels or changes its depth by more than d_depth relative to the
// reference depth. Votes are summed over the M source views and mapped to a
// per-pixel loss weight.

#include "gcmvs/reprojection.hpp"
#include "gcmvs/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace gcmvs {

struct GcThresholds
{
    double d_pixel = 1.0;   // pixels
    double d_depth = 0.01;  // relative

    void validate() const;
};

/// Coarse, intermediate and refine stage thresholds.
inline constexpr std::array<GcThresholds, 3> kStageThresholds{{{1.0, 0.01}, {0.5, 0.005}, {0.25, 0.0025}}};

enum class RangeMode { OneTwo, OneThree };

struct PenaltyMap
{
    Grid values;
    Image<int> mask_sum;  // inconsistent-view count per pixel, in [0, m]
    RangeMode range_mode = RangeMode::OneTwo;
    int m = 0;

    Eigen::Index height() const { return values.rows(); }
    Eigen::Index width() const { return values.cols(); }
};

/// Penalty value for `mask_sum` inconsistent votes out of `m` views.
double penalty_level(int mask_sum, int m, RangeMode mode);

/// 1 where PDE > d_pixel or RDD > d_depth, and wherever the reprojection is
/// invalid (occluded or out of view in the source). Throws ComputeError when
/// a valid reference pixel has non-positive depth.
Mask inconsistency_mask(const DepthMap& d_ref, const DepthMap& d_reproj, const CoordinateGrid& p_reproj,
                        const GcThresholds& thresholds);

PenaltyMap per_pixel_penalty(const DepthMap& d_ref, const CameraD& ref, std::span<const View> sources,
                             const GcThresholds& thresholds, RangeMode range_mode, int threads = 1);

/// Element-wise product with the reference validity mask.
PenaltyMap apply_reference_mask(const PenaltyMap& penalty, const Mask& ref_mask);

/// Pixel count per level k = 0..m over pixels inside `region`.
std::vector<long> level_histogram(const PenaltyMap& penalty, const Mask& region);

} // namespace gcmvs
