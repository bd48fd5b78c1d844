#include "gcmvs/gc_penalty.hpp"

#include "gcmvs/error.hpp"

#include <cmath>
#include <stdexcept>

namespace gcmvs {

namespace {

void require_same_shape(Eigen::Index rows, Eigen::Index cols, Eigen::Index r2, Eigen::Index c2, const char* what)
{
    if (rows != r2 || cols != c2)
        throw std::invalid_argument(std::string("image dimensions differ: ") + what);
}

void require_positive_reference(const DepthMap& d_ref)
{
    for (Eigen::Index r = 0; r < d_ref.height(); ++r)
        for (Eigen::Index c = 0; c < d_ref.width(); ++c)
            if (d_ref.valid(r, c) && !(d_ref.values(r, c) > 0.0))
                throw ComputeError("zero reference depth at pixel (" + std::to_string(c) + ", " +
                                   std::to_string(r) + ")");
}

} // namespace

void GcThresholds::validate() const
{
    if (!(d_pixel > 0.0) || !(d_depth > 0.0))
        throw std::invalid_argument("consistency thresholds must be strictly positive");
}

double penalty_level(int mask_sum, int m, RangeMode mode)
{
    if (m <= 0)
        throw std::invalid_argument("penalty needs at least one source view");
    if (mode == RangeMode::OneTwo)
        return 1.0 + double(mask_sum) / double(m);
    return 1.0 + double(mask_sum) / (double(m) / 2.0);
}

Mask inconsistency_mask(const DepthMap& d_ref, const DepthMap& d_reproj, const CoordinateGrid& p_reproj,
                        const GcThresholds& thresholds)
{
    thresholds.validate();
    d_ref.check_shape();
    d_reproj.check_shape();
    const Eigen::Index rows = d_ref.height();
    const Eigen::Index cols = d_ref.width();
    require_same_shape(rows, cols, d_reproj.height(), d_reproj.width(), "reprojected depth");
    require_same_shape(rows, cols, p_reproj.height(), p_reproj.width(), "reprojected pixels");
    require_positive_reference(d_ref);

    Mask mask(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!d_ref.valid(r, c) || !d_reproj.valid(r, c) || !p_reproj.valid(r, c)) {
                mask(r, c) = true;
                continue;
            }
            const double dx = double(c) - p_reproj.x(r, c);
            const double dy = double(r) - p_reproj.y(r, c);
            const double pde = std::sqrt(dx * dx + dy * dy);
            const double d0 = d_ref.values(r, c);
            const double rdd = std::abs(d_reproj.values(r, c) - d0) / d0;
            mask(r, c) = pde > thresholds.d_pixel || rdd > thresholds.d_depth;
        }
    return mask;
}

PenaltyMap per_pixel_penalty(const DepthMap& d_ref, const CameraD& ref, std::span<const View> sources,
                             const GcThresholds& thresholds, RangeMode range_mode, int threads)
{
    thresholds.validate();
    d_ref.check_shape();
    if (sources.empty())
        throw std::invalid_argument("geometric consistency needs at least one source view");
    const Eigen::Index rows = d_ref.height();
    const Eigen::Index cols = d_ref.width();
    for (const auto& s : sources) {
        s.depth.check_shape();
        require_same_shape(rows, cols, s.depth.height(), s.depth.width(), "source depth map");
    }
    require_positive_reference(d_ref);

    PenaltyMap out;
    out.m = static_cast<int>(sources.size());
    out.range_mode = range_mode;
    out.mask_sum = Image<int>::Zero(rows, cols);
    for (const auto& s : sources) {
        const Reprojection back = fbr(d_ref, ref, s.depth, s.camera, threads);
        out.mask_sum += inconsistency_mask(d_ref, back.depth, back.pixels, thresholds).cast<int>();
    }
    out.values = out.mask_sum.unaryExpr([&](int k) { return penalty_level(k, out.m, range_mode); });
    return out;
}

PenaltyMap apply_reference_mask(const PenaltyMap& penalty, const Mask& ref_mask)
{
    require_same_shape(penalty.height(), penalty.width(), ref_mask.rows(), ref_mask.cols(), "reference mask");
    PenaltyMap out = penalty;
    out.values = ref_mask.select(penalty.values, 0.0);
    return out;
}

std::vector<long> level_histogram(const PenaltyMap& penalty, const Mask& region)
{
    require_same_shape(penalty.height(), penalty.width(), region.rows(), region.cols(), "histogram region");
    std::vector<long> counts(static_cast<std::size_t>(penalty.m) + 1, 0);
    for (Eigen::Index r = 0; r < penalty.height(); ++r)
        for (Eigen::Index c = 0; c < penalty.width(); ++c)
            if (region(r, c))
                ++counts.at(static_cast<std::size_t>(penalty.mask_sum(r, c)));
    return counts;
}

} // namespace gcmvs
