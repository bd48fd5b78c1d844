#include "gcmvs/loss.hpp"

#include "gcmvs/error.hpp"
#include "gcmvs/summation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gcmvs {

void ProbabilityVolume::check_shape() const
{
    if (probs.size() < 2)
        throw std::invalid_argument("probability volume needs at least two hypotheses");
    const Eigen::Index rows = height();
    const Eigen::Index cols = width();
    for (const auto& p : probs)
        if (p.rows() != rows || p.cols() != cols)
            throw std::invalid_argument("probability slices differ in shape");
    if (per_pixel()) {
        if (pixel_hypotheses.size() != probs.size())
            throw std::invalid_argument("per-pixel hypothesis count differs from probability count");
        for (const auto& h : pixel_hypotheses)
            if (h.rows() != rows || h.cols() != cols)
                throw std::invalid_argument("hypothesis slices differ in shape");
        for (std::size_t d = 1; d < pixel_hypotheses.size(); ++d)
            if (!(pixel_hypotheses[d] > pixel_hypotheses[d - 1]).all())
                throw std::invalid_argument("hypotheses must be strictly increasing at every pixel");
    } else {
        if (shared_hypotheses.size() != probs.size())
            throw std::invalid_argument("hypothesis count differs from probability count");
        for (std::size_t d = 1; d < shared_hypotheses.size(); ++d)
            if (!(shared_hypotheses[d] > shared_hypotheses[d - 1]))
                throw std::invalid_argument("hypotheses must be strictly increasing");
    }
}

Eigen::Index nearest_hypothesis(const ProbabilityVolume& vol, Eigen::Index r, Eigen::Index c, double depth)
{
    Eigen::Index best = 0;
    double best_dist = std::abs(vol.hypothesis(0, r, c) - depth);
    for (Eigen::Index d = 1; d < vol.depth_count(); ++d) {
        const double dist = std::abs(vol.hypothesis(d, r, c) - depth);
        if (dist < best_dist) {
            best = d;
            best_dist = dist;
        }
    }
    return best;
}

ErrorMap cross_entropy_error(const ProbabilityVolume& vol, const DepthMap& gt)
{
    vol.check_shape();
    gt.check_shape();
    const Eigen::Index rows = vol.height();
    const Eigen::Index cols = vol.width();
    if (gt.height() != rows || gt.width() != cols)
        throw std::invalid_argument("ground truth and probability volume differ in shape");

    const Eigen::Index last = vol.depth_count() - 1;
    ErrorMap out{Grid::Zero(rows, cols), Mask::Constant(rows, cols, false)};
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!gt.valid(r, c))
                continue;
            const double depth = gt.values(r, c);
            if (depth < vol.hypothesis(0, r, c) || depth > vol.hypothesis(last, r, c))
                continue;
            CompensatedSum total;
            for (Eigen::Index d = 0; d <= last; ++d) {
                const double p = vol.probs[std::size_t(d)](r, c);
                if (!(p >= 0.0))
                    throw ComputeError("negative or NaN probability at pixel (" + std::to_string(c) + ", " +
                                       std::to_string(r) + ")");
                total.add(p);
            }
            if (std::abs(total.value() - 1.0) > kNormalizationTol)
                throw ComputeError("probability volume not normalized at pixel (" + std::to_string(c) + ", " +
                                   std::to_string(r) + ")");
            const double p = vol.probs[std::size_t(nearest_hypothesis(vol, r, c, depth))](r, c);
            out.values(r, c) = -std::log(std::max(p, kProbabilityFloor));
            out.valid(r, c) = true;
        }
    return out;
}

double stage_loss(const Grid& penalty, const Grid& error, const Mask& valid)
{
    if (penalty.rows() != error.rows() || penalty.cols() != error.cols() || valid.rows() != error.rows() ||
        valid.cols() != error.cols())
        throw std::invalid_argument("stage loss inputs differ in shape");
    CompensatedSum sum;
    long count = 0;
    for (Eigen::Index r = 0; r < error.rows(); ++r)
        for (Eigen::Index c = 0; c < error.cols(); ++c)
            if (valid(r, c)) {
                sum.add(penalty(r, c) * error(r, c));
                ++count;
            }
    if (count == 0)
        throw ComputeError("no supervised pixels");
    return sum.value() / double(count);
}

double stage_loss(const PenaltyMap& penalty, const ErrorMap& error)
{
    return stage_loss(penalty.values, error.values, error.valid);
}

double total_loss(const std::array<double, 3>& stage_losses, const StageWeights& w)
{
    return w.alpha * stage_losses[0] + w.beta * stage_losses[1] + w.gamma * stage_losses[2];
}

} // namespace gcmvs
