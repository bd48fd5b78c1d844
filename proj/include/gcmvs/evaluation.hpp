#pragma once

// Point-cloud accuracy/completeness and depth-map error metrics.

#include "gcmvs/types.hpp"

#include <vector>

namespace gcmvs {

struct PointCloudMetrics
{
    double accuracy = 0.0;
    double completeness = 0.0;
    double overall = 0.0;
    double max_dist = 0.0;
    std::size_t accuracy_measured = 0;      // predicted points within max_dist
    std::size_t completeness_measured = 0;  // ground-truth points within max_dist
};

struct DepthMetrics
{
    double epe = 0.0;
    double e1 = 0.0;
    double e3 = 0.0;
    std::size_t pixels = 0;
};

/// Distance from each query point to its nearest reference point, through a
/// k-d tree.
std::vector<double> nearest_distances(const PointCloud& query, const PointCloud& reference, int threads = 1);

/// Mean nearest-neighbor distance pred -> gt over distances <= max_dist.
/// Throws ComputeError("no measurable points") when nothing is within range.
double accuracy(const PointCloud& pred, const PointCloud& gt, double max_dist, int threads = 1);

/// accuracy with the roles of the two clouds swapped.
double completeness(const PointCloud& pred, const PointCloud& gt, double max_dist, int threads = 1);

inline double overall(double acc, double comp) { return (acc + comp) / 2.0; }

PointCloudMetrics evaluate_point_clouds(const PointCloud& pred, const PointCloud& gt, double max_dist,
                                        int threads = 1);

/// EPE and the fractions of pixels with |pred - gt| > 1 and > 3, over `valid`.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, const Mask& valid);

} // namespace gcmvs
