#pragma once

// Penalty-weighted classification loss over depth hypotheses.

#include "gcmvs/gc_penalty.hpp"
#include "gcmvs/types.hpp"

#include <array>
#include <vector>

namespace gcmvs {

/// Per-pixel distribution over D depth hypotheses. `probs[d]` is the H x W
/// slice for hypothesis d. Hypotheses are either shared by all pixels
/// (`shared_hypotheses`) or given per pixel (`pixel_hypotheses`, D slices).
struct ProbabilityVolume
{
    std::vector<Grid> probs;
    std::vector<double> shared_hypotheses;
    std::vector<Grid> pixel_hypotheses;

    Eigen::Index depth_count() const { return static_cast<Eigen::Index>(probs.size()); }
    Eigen::Index height() const { return probs.empty() ? 0 : probs.front().rows(); }
    Eigen::Index width() const { return probs.empty() ? 0 : probs.front().cols(); }
    bool per_pixel() const { return !pixel_hypotheses.empty(); }
    double hypothesis(Eigen::Index d, Eigen::Index r, Eigen::Index c) const
    {
        return per_pixel() ? pixel_hypotheses[std::size_t(d)](r, c) : shared_hypotheses[std::size_t(d)];
    }

    /// Throws std::invalid_argument on inconsistent shapes or non-increasing
    /// hypotheses.
    void check_shape() const;
};

/// Per-pixel error with its own support mask.
struct ErrorMap
{
    Grid values;
    Mask valid;
};

struct StageWeights
{
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 2.0;
};

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kNormalizationTol = 1e-5;

/// Index of the hypothesis nearest to `depth` at pixel (r, c); ties go to
/// the lower index.
Eigen::Index nearest_hypothesis(const ProbabilityVolume& vol, Eigen::Index r, Eigen::Index c, double depth);

/// -log(max(p[bin], 1e-12)) against the one-hot nearest bin of the ground
/// truth. Pixels with invalid or out-of-range ground truth are masked out.
/// Throws ComputeError when a supervised pixel's distribution does not sum to
/// one within 1e-5 or has a negative entry.
ErrorMap cross_entropy_error(const ProbabilityVolume& vol, const DepthMap& gt);

/// mean(penalty * error) over `valid`. Throws ComputeError("no supervised
/// pixels") on an empty mask.
double stage_loss(const Grid& penalty, const Grid& error, const Mask& valid);

double stage_loss(const PenaltyMap& penalty, const ErrorMap& error);

double total_loss(const std::array<double, 3>& stage_losses, const StageWeights& w);

} // namespace gcmvs
