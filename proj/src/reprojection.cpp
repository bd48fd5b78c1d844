#include "gcmvs/reprojection.hpp"

#include "gcmvs/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace gcmvs {

ForwardWarp forward_project(const DepthMap& d_ref, const CameraD& ref, const CameraD& src, int threads)
{
    d_ref.check_shape();
    const Mat4<double> warp = warp_transform(ref, src);
    const Eigen::Index rows = d_ref.height();
    const Eigen::Index cols = d_ref.width();
    ForwardWarp out{CoordinateGrid(rows, cols), DepthMap(rows, cols)};

    parallel_for(rows, threads, [&](std::int64_t begin, std::int64_t end) {
        for (Eigen::Index r = begin; r < end; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!d_ref.valid(r, c))
                    continue;
                const auto hit = apply_warp(warp, Pixel(double(c), double(r)), d_ref.values(r, c));
                if (!hit.in_front || !hit.pixel.allFinite())
                    continue;
                out.coords.x(r, c) = hit.pixel.x();
                out.coords.y(r, c) = hit.pixel.y();
                out.coords.valid(r, c) = true;
                out.depth.values(r, c) = hit.depth;
                out.depth.valid(r, c) = true;
            }
    });
    return out;
}

std::optional<double> sample_bilinear(const DepthMap& map, double x, double y)
{
    const Eigen::Index w = map.width();
    const Eigen::Index h = map.height();
    if (!(x >= 0.0 && y >= 0.0 && x <= double(w - 1) && y <= double(h - 1)))
        return std::nullopt;
    const auto x0 = static_cast<Eigen::Index>(std::floor(x));
    const auto y0 = static_cast<Eigen::Index>(std::floor(y));
    const double fx = x - double(x0);
    const double fy = y - double(y0);

    // Only neighbors with non-zero weight take part; x0 == w - 1 implies fx == 0.
    const bool use_x1 = fx > 0.0;
    const bool use_y1 = fy > 0.0;
    const auto tap = [&](Eigen::Index yy, Eigen::Index xx, double& v) {
        if (!map.valid(yy, xx))
            return false;
        v = map.values(yy, xx);
        return true;
    };

    double v00 = 0, v01 = 0, v10 = 0, v11 = 0;
    if (!tap(y0, x0, v00))
        return std::nullopt;
    if (use_x1 && !tap(y0, x0 + 1, v01))
        return std::nullopt;
    if (use_y1 && !tap(y0 + 1, x0, v10))
        return std::nullopt;
    if (use_x1 && use_y1 && !tap(y0 + 1, x0 + 1, v11))
        return std::nullopt;

    const double top = use_x1 ? (1.0 - fx) * v00 + fx * v01 : v00;
    if (!use_y1)
        return top;
    const double bottom = use_x1 ? (1.0 - fx) * v10 + fx * v11 : v10;
    return (1.0 - fy) * top + fy * bottom;
}

DepthMap remap(const DepthMap& src_map, const CoordinateGrid& coords, int threads)
{
    src_map.check_shape();
    const Eigen::Index rows = coords.height();
    const Eigen::Index cols = coords.width();
    DepthMap out(rows, cols);
    parallel_for(rows, threads, [&](std::int64_t begin, std::int64_t end) {
        for (Eigen::Index r = begin; r < end; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!coords.valid(r, c))
                    continue;
                if (const auto v = sample_bilinear(src_map, coords.x(r, c), coords.y(r, c))) {
                    out.values(r, c) = *v;
                    out.valid(r, c) = true;
                }
            }
    });
    return out;
}

Reprojection fbr(const DepthMap& d_ref, const CameraD& ref, const DepthMap& d_src_gt, const CameraD& src,
                 int threads)
{
    d_ref.check_shape();
    d_src_gt.check_shape();
    const ForwardWarp forward = forward_project(d_ref, ref, src, threads);
    const DepthMap remapped = remap(d_src_gt, forward.coords, threads);
    const Mat4<double> back = warp_transform(src, ref);

    const Eigen::Index rows = d_ref.height();
    const Eigen::Index cols = d_ref.width();
    Reprojection out{DepthMap(rows, cols), CoordinateGrid(rows, cols), forward.coords};
    parallel_for(rows, threads, [&](std::int64_t begin, std::int64_t end) {
        for (Eigen::Index r = begin; r < end; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!remapped.valid(r, c))
                    continue;
                const Pixel landing(forward.coords.x(r, c), forward.coords.y(r, c));
                const auto hit = apply_warp(back, landing, remapped.values(r, c));
                if (!hit.in_front || !hit.pixel.allFinite())
                    continue;
                out.depth.values(r, c) = hit.depth;
                out.depth.valid(r, c) = true;
                out.pixels.x(r, c) = hit.pixel.x();
                out.pixels.y(r, c) = hit.pixel.y();
                out.pixels.valid(r, c) = true;
            }
    });
    return out;
}

} // namespace gcmvs
