#include "gcmvs/kd_tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gcmvs {

KdTree::KdTree(std::span<const Point3> points, int leaf_size)
    : points_(points.begin(), points.end()), order_(points.size()), leaf_size_(std::max(1, leaf_size))
{
    if (points_.size() > std::size_t(std::numeric_limits<std::int32_t>::max()))
        throw std::invalid_argument("point cloud too large for the spatial index");
    std::iota(order_.begin(), order_.end(), 0);
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / std::size_t(leaf_size_) + 1);
        build(0, static_cast<std::int32_t>(points_.size()));
    }
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end)
{
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_)
        return id;

    Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
    Point3 hi = -lo;
    for (std::int32_t i = begin; i < end; ++i) {
        lo = lo.cwiseMin(points_[std::size_t(order_[std::size_t(i)])]);
        hi = hi.cwiseMax(points_[std::size_t(order_[std::size_t(i)])]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                         const double pa = points_[std::size_t(a)][axis];
                         const double pb = points_[std::size_t(b)][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    const double split = points_[std::size_t(order_[std::size_t(mid)])][axis];
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[std::size_t(id)].axis = axis;
    nodes_[std::size_t(id)].split = split;
    nodes_[std::size_t(id)].left = left;
    nodes_[std::size_t(id)].right = right;
    return id;
}

void KdTree::search(std::int32_t node_id, const Point3& q, Hit& best) const
{
    const Node& node = nodes_[std::size_t(node_id)];
    if (node.left < 0) {
        for (std::int32_t i = node.begin; i < node.end; ++i) {
            const std::int32_t idx = order_[std::size_t(i)];
            const double d2 = (points_[std::size_t(idx)] - q).squaredNorm();
            if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) {
                best.squared_distance = d2;
                best.index = idx;
            }
        }
        return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double diff = q[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, best);
    if (diff * diff <= best.squared_distance)
        search(far, q, best);
}

KdTree::Hit KdTree::nearest(const Point3& query) const
{
    Hit best;
    best.squared_distance = std::numeric_limits<double>::infinity();
    if (!nodes_.empty())
        search(0, query, best);
    return best;
}

} // namespace gcmvs
