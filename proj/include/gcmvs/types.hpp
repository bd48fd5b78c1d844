#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace gcmvs {

/// Row-major H x W raster, indexed (row, col) = (y, x).
template <class Scalar_>
using Image = Eigen::Array<Scalar_, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Grid = Image<double>;
using Mask = Image<bool>;

template <class Scalar_>
using Vec2 = Eigen::Matrix<Scalar_, 2, 1>;
template <class Scalar_>
using Vec3 = Eigen::Matrix<Scalar_, 3, 1>;
template <class Scalar_>
using Mat3 = Eigen::Matrix<Scalar_, 3, 3>;
template <class Scalar_>
using Mat4 = Eigen::Matrix<Scalar_, 4, 4>;

using Pixel = Vec2<double>;
using Point3 = Vec3<double>;

/// Depth raster with explicit validity. Values at invalid pixels are ignored
/// by every consumer and are conventionally zero.
struct DepthMap
{
    Grid values;
    Mask valid;

    DepthMap() = default;
    DepthMap(Eigen::Index height, Eigen::Index width)
        : values(Grid::Zero(height, width)), valid(Mask::Constant(height, width, false))
    {}

    /// Valid wherever the value is finite and strictly positive.
    static DepthMap from_values(const Grid& values);

    Eigen::Index height() const { return values.rows(); }
    Eigen::Index width() const { return values.cols(); }

    /// Throws std::invalid_argument when values and mask disagree in shape.
    void check_shape() const;

    /// Copy with invalid pixels forced to zero.
    Grid masked_values() const { return valid.select(values, 0.0); }
};

/// Continuous source-view coordinates for every reference pixel.
struct CoordinateGrid
{
    Grid x;
    Grid y;
    Mask valid;

    CoordinateGrid() = default;
    CoordinateGrid(Eigen::Index height, Eigen::Index width)
        : x(Grid::Zero(height, width)), y(Grid::Zero(height, width)),
          valid(Mask::Constant(height, width, false))
    {}

    /// x(r, c) = c, y(r, c) = r, all valid.
    static CoordinateGrid identity(Eigen::Index height, Eigen::Index width);

    Eigen::Index height() const { return x.rows(); }
    Eigen::Index width() const { return x.cols(); }
};

using Rgb = std::array<std::uint8_t, 3>;

struct PointCloud
{
    std::vector<Point3> points;
    std::vector<Rgb> colors;        // empty or one per point
    std::vector<float> confidence;  // empty or one per point

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }
};

} // namespace gcmvs
