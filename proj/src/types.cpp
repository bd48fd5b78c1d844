#include "gcmvs/types.hpp"

#include <cmath>
#include <stdexcept>

namespace gcmvs {

DepthMap DepthMap::from_values(const Grid& values)
{
    DepthMap out;
    out.values = values;
    out.valid = values.unaryExpr([](double v) { return std::isfinite(v) && v > 0.0; });
    out.values = out.valid.select(out.values, 0.0);
    return out;
}

void DepthMap::check_shape() const
{
    if (values.rows() != valid.rows() || values.cols() != valid.cols())
        throw std::invalid_argument("depth map values and validity mask differ in shape");
}

CoordinateGrid CoordinateGrid::identity(Eigen::Index height, Eigen::Index width)
{
    CoordinateGrid out(height, width);
    for (Eigen::Index r = 0; r < height; ++r)
        for (Eigen::Index c = 0; c < width; ++c) {
            out.x(r, c) = static_cast<double>(c);
            out.y(r, c) = static_cast<double>(r);
        }
    out.valid.setConstant(true);
    return out;
}

} // namespace gcmvs
