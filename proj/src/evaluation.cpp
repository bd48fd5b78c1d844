#include "gcmvs/evaluation.hpp"

#include "gcmvs/error.hpp"
#include "gcmvs/kd_tree.hpp"
#include "gcmvs/parallel.hpp"
#include "gcmvs/summation.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gcmvs {

namespace {

std::pair<double, std::size_t> thresholded_mean(const std::vector<double>& distances, double max_dist)
{
    CompensatedSum sum;
    std::size_t count = 0;
    for (double d : distances)
        if (d <= max_dist) {
            sum.add(d);
            ++count;
        }
    if (count == 0)
        throw ComputeError("no measurable points");
    return {sum.value() / double(count), count};
}

void require_inputs(const PointCloud& a, const PointCloud& b, double max_dist)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("point cloud metrics need two non-empty clouds");
    if (!(max_dist >= 0.0))
        throw std::invalid_argument("max_dist must be non-negative");
}

} // namespace

std::vector<double> nearest_distances(const PointCloud& query, const PointCloud& reference, int threads)
{
    const KdTree tree(reference.points);
    std::vector<double> out(query.size());
    parallel_for(static_cast<std::int64_t>(query.size()), threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i)
            out[std::size_t(i)] = std::sqrt(tree.nearest(query.points[std::size_t(i)]).squared_distance);
    });
    return out;
}

double accuracy(const PointCloud& pred, const PointCloud& gt, double max_dist, int threads)
{
    require_inputs(pred, gt, max_dist);
    return thresholded_mean(nearest_distances(pred, gt, threads), max_dist).first;
}

double completeness(const PointCloud& pred, const PointCloud& gt, double max_dist, int threads)
{
    return accuracy(gt, pred, max_dist, threads);
}

PointCloudMetrics evaluate_point_clouds(const PointCloud& pred, const PointCloud& gt, double max_dist, int threads)
{
    require_inputs(pred, gt, max_dist);
    PointCloudMetrics m;
    m.max_dist = max_dist;
    std::tie(m.accuracy, m.accuracy_measured) = thresholded_mean(nearest_distances(pred, gt, threads), max_dist);
    std::tie(m.completeness, m.completeness_measured) =
        thresholded_mean(nearest_distances(gt, pred, threads), max_dist);
    m.overall = overall(m.accuracy, m.completeness);
    return m;
}

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, const Mask& valid)
{
    pred.check_shape();
    gt.check_shape();
    if (pred.height() != gt.height() || pred.width() != gt.width() || valid.rows() != gt.height() ||
        valid.cols() != gt.width())
        throw std::invalid_argument("depth metric inputs differ in shape");
    CompensatedSum sum;
    std::size_t count = 0, over1 = 0, over3 = 0;
    for (Eigen::Index r = 0; r < gt.height(); ++r)
        for (Eigen::Index c = 0; c < gt.width(); ++c) {
            if (!valid(r, c))
                continue;
            const double err = std::abs(pred.values(r, c) - gt.values(r, c));
            sum.add(err);
            ++count;
            over1 += err > 1.0;
            over3 += err > 3.0;
        }
    if (count == 0)
        throw ComputeError("no valid pixels for depth metrics");
    DepthMetrics m;
    m.pixels = count;
    m.epe = sum.value() / double(count);
    m.e1 = double(over1) / double(count);
    m.e3 = double(over3) / double(count);
    return m;
}

} // namespace gcmvs
