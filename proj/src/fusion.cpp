#include "gcmvs/fusion.hpp"

#include "gcmvs/parallel.hpp"
#include "gcmvs/reprojection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gcmvs {

DynamicTable default_dynamic_table()
{
    DynamicTable table;
    for (int k = 1; k <= 10; ++k)
        table.emplace_back(0.25 * k, 0.0025 * k);
    return table;
}

std::pair<double, double> dynamic_thresholds(int num_required, const DynamicTable& table)
{
    if (num_required < 1)
        throw std::invalid_argument("required view count must be >= 1");
    if (table.empty())
        throw std::invalid_argument("dynamic threshold table is empty");
    return table[std::min<std::size_t>(std::size_t(num_required), table.size()) - 1];
}

void FusionParams::validate() const
{
    if (!(prob_threshold >= 0.0 && prob_threshold <= 1.0))
        throw std::invalid_argument("prob_threshold must lie in [0, 1]");
    if (consistency_threshold < 1)
        throw std::invalid_argument("consistency_threshold must be >= 1");
    if (mode == FusionMode::Fusibile && (!(disparity_threshold > 0.0) || !(relative_depth_tol > 0.0)))
        throw std::invalid_argument("fusibile thresholds must be positive");
    if (mode == FusionMode::Dynamic) {
        if (dynamic_table.empty())
            throw std::invalid_argument("dynamic threshold table is empty");
        for (std::size_t k = 1; k < dynamic_table.size(); ++k)
            if (dynamic_table[k].first < dynamic_table[k - 1].first)
                throw std::invalid_argument("dynamic displacement thresholds must be non-decreasing");
    }
}

namespace {

struct SourceCheck
{
    Reprojection back;
    int source = 0;
};

struct Agreement
{
    double displacement;
    double relative_depth;
};

std::optional<Agreement> agreement(const SourceCheck& s, const DepthMap& ref, Eigen::Index r, Eigen::Index c)
{
    if (!s.back.depth.valid(r, c))
        return std::nullopt;
    const double dx = double(c) - s.back.pixels.x(r, c);
    const double dy = double(r) - s.back.pixels.y(r, c);
    const double d0 = ref.values(r, c);
    return Agreement{std::sqrt(dx * dx + dy * dy), std::abs(s.back.depth.values(r, c) - d0) / d0};
}

double aggregate(std::vector<double>& depths, DepthAggregate how)
{
    if (how == DepthAggregate::Median) {
        std::sort(depths.begin(), depths.end());
        const std::size_t n = depths.size();
        return n % 2 ? depths[n / 2] : 0.5 * (depths[n / 2 - 1] + depths[n / 2]);
    }
    double sum = 0.0;
    for (double d : depths)
        sum += d;
    return sum / double(depths.size());
}

} // namespace

PointCloud fuse(const std::vector<FusionView>& views, const FusionParams& params,
                const std::vector<std::vector<int>>& sources, int threads)
{
    params.validate();
    if (views.size() < 2)
        throw std::invalid_argument("fusion needs at least two views");
    const Eigen::Index rows = views.front().depth.height();
    const Eigen::Index cols = views.front().depth.width();
    for (const auto& v : views) {
        v.depth.check_shape();
        if (v.depth.height() != rows || v.depth.width() != cols || v.confidence.rows() != rows ||
            v.confidence.cols() != cols)
            throw std::invalid_argument("fusion views differ in image dimensions");
        if (!v.color.empty() && v.color.size() != std::size_t(rows * cols))
            throw std::invalid_argument("color image size differs from depth map");
    }
    if (!sources.empty() && sources.size() != views.size())
        throw std::invalid_argument("source lists must be given for every view");

    const bool colored = std::all_of(views.begin(), views.end(), [](const FusionView& v) { return !v.color.empty(); });
    const int view_count = static_cast<int>(views.size());
    std::vector<int> refs = params.reference_views;
    if (refs.empty())
        for (int v = 0; v < view_count; ++v)
            refs.push_back(v);
    std::vector<int> order(std::size_t(view_count), -1);
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const int v = refs[i];
        if (v < 0 || v >= view_count || order[std::size_t(v)] >= 0)
            throw std::invalid_argument("invalid or repeated reference view " + std::to_string(v));
        order[std::size_t(v)] = int(i);
    }
    const auto sources_of = [&](int v) {
        std::vector<int> out;
        if (sources.empty()) {
            for (int s = 0; s < view_count; ++s)
                if (s != v)
                    out.push_back(s);
        } else {
            for (int s : sources[std::size_t(v)]) {
                if (s < 0 || s >= view_count || s == v)
                    throw std::invalid_argument("invalid source view " + std::to_string(s));
                out.push_back(s);
            }
        }
        return out;
    };

    const auto [cover_disp, cover_depth] = params.mode == FusionMode::Fusibile
                                               ? std::pair{params.disparity_threshold, params.relative_depth_tol}
                                               : dynamic_thresholds(1, params.dynamic_table);

    std::vector<Mask> consumed(std::size_t(view_count), Mask::Constant(rows, cols, false));
    std::vector<PointCloud> per_view(refs.size());

    for (std::size_t step = 0; step < refs.size(); ++step) {
        const int ref_id = refs[step];
        const FusionView& ref = views[std::size_t(ref_id)];
        std::vector<SourceCheck> checks;
        for (int s : sources_of(ref_id))
            checks.push_back({fbr(ref.depth, ref.camera, views[std::size_t(s)].depth, views[std::size_t(s)].camera,
                                  threads),
                              s});

        std::vector<PointCloud> row_points(static_cast<std::size_t>(rows));
        const Mask& done = consumed[std::size_t(ref_id)];
        parallel_for(rows, threads, [&](std::int64_t begin, std::int64_t end) {
            std::vector<Agreement> agree;
            std::vector<char> agree_ok;
            std::vector<double> depths;
            for (Eigen::Index r = begin; r < end; ++r) {
                auto& out = row_points[std::size_t(r)];
                for (Eigen::Index c = 0; c < cols; ++c) {
                    if (done(r, c) || !ref.depth.valid(r, c) || !(ref.confidence(r, c) > params.prob_threshold))
                        continue;
                    agree.assign(checks.size(), Agreement{0, 0});
                    agree_ok.assign(checks.size(), 0);
                    for (std::size_t i = 0; i < checks.size(); ++i)
                        if (auto a = agreement(checks[i], ref.depth, r, c)) {
                            agree[i] = *a;
                            agree_ok[i] = 1;
                        }

                    const auto consistent = [&](std::size_t i, double disp, double rel) {
                        return agree_ok[i] && agree[i].displacement < disp && agree[i].relative_depth < rel;
                    };
                    int chosen_k = 0;
                    double disp = params.disparity_threshold, rel = params.relative_depth_tol;
                    if (params.mode == FusionMode::Fusibile) {
                        int count = 0;
                        for (std::size_t i = 0; i < checks.size(); ++i)
                            count += consistent(i, disp, rel);
                        if (count >= params.consistency_threshold)
                            chosen_k = params.consistency_threshold;
                    } else {
                        for (int k = params.consistency_threshold; k <= int(checks.size()); ++k) {
                            std::tie(disp, rel) = dynamic_thresholds(k, params.dynamic_table);
                            int count = 0;
                            for (std::size_t i = 0; i < checks.size(); ++i)
                                count += consistent(i, disp, rel);
                            if (count >= k) {
                                chosen_k = k;
                                break;
                            }
                        }
                    }
                    if (chosen_k == 0)
                        continue;

                    depths.assign(1, ref.depth.values(r, c));
                    for (std::size_t i = 0; i < checks.size(); ++i)
                        if (consistent(i, disp, rel))
                            depths.push_back(checks[i].back.depth.values(r, c));
                    const double fused = aggregate(depths, params.aggregate);
                    out.points.push_back(back_project(Pixel(double(c), double(r)), fused, ref.camera));
                    out.confidence.push_back(static_cast<float>(ref.confidence(r, c)));
                    if (colored)
                        out.colors.push_back(ref.color[std::size_t(r * cols + c)]);
                }
            }
        });
        for (auto& rp : row_points) {
            auto& pv = per_view[step];
            pv.points.insert(pv.points.end(), rp.points.begin(), rp.points.end());
            pv.confidence.insert(pv.confidence.end(), rp.confidence.begin(), rp.confidence.end());
            pv.colors.insert(pv.colors.end(), rp.colors.begin(), rp.colors.end());
        }

        // Consume pixels of later reference views that this view already explains.
        for (const auto& check : checks) {
            if (order[std::size_t(check.source)] <= int(step))
                continue;
            Mask& target = consumed[std::size_t(check.source)];
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    const auto a = agreement(check, ref.depth, r, c);
                    if (!a || !(a->displacement < cover_disp && a->relative_depth < cover_depth))
                        continue;
                    const auto qx = static_cast<Eigen::Index>(std::lround(check.back.landing.x(r, c)));
                    const auto qy = static_cast<Eigen::Index>(std::lround(check.back.landing.y(r, c)));
                    if (qx >= 0 && qy >= 0 && qx < cols && qy < rows)
                        target(qy, qx) = true;
                }
        }
    }

    PointCloud cloud;
    for (auto& pv : per_view) {
        cloud.points.insert(cloud.points.end(), pv.points.begin(), pv.points.end());
        cloud.confidence.insert(cloud.confidence.end(), pv.confidence.begin(), pv.confidence.end());
        cloud.colors.insert(cloud.colors.end(), pv.colors.begin(), pv.colors.end());
    }
    return cloud;
}

} // namespace gcmvs
