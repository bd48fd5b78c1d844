#pragma once

#include "gcmvs/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gcmvs {

/// Static 3-d tree with exact nearest-neighbor queries.
class KdTree
{
public:
    struct Hit
    {
        std::int64_t index = -1;
        double squared_distance = 0.0;
    };

    explicit KdTree(std::span<const Point3> points, int leaf_size = 12);

    /// Exact nearest neighbor; ties resolve to the smallest point index.
    Hit nearest(const Point3& query) const;

    std::size_t size() const { return points_.size(); }

private:
    struct Node
    {
        std::int32_t begin = 0;  // range into order_
        std::int32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::int32_t begin, std::int32_t end);
    void search(std::int32_t node, const Point3& q, Hit& best) const;

    std::vector<Point3> points_;
    std::vector<std::int32_t> order_;
    std::vector<Node> nodes_;
    int leaf_size_;
};

} // namespace gcmvs
