#include "gcmvs/view_selection.hpp"

#include "gcmvs/error.hpp"
#include "gcmvs/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace gcmvs {

std::vector<int> ViewPairing::top(std::size_t m) const
{
    std::vector<int> ids;
    for (std::size_t i = 0; i < std::min(m, ranked_sources.size()); ++i)
        ids.push_back(ranked_sources[i].id);
    return ids;
}

double AngleWeight::operator()(double theta_deg) const
{
    const double sigma = theta_deg <= theta0 ? sigma_low : sigma_high;
    const double d = theta_deg - theta0;
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

double triangulation_angle(const Point3& center_a, const Point3& center_b, const Point3& point)
{
    const Point3 a = center_a - point;
    const Point3 b = center_b - point;
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12)
        return -1.0;
    const double cosine = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

double pair_score(const CameraD& ref, const CameraD& src, std::span<const Point3> sample_points,
                  const AngleWeight& weight)
{
    const Point3 cr = ref.center();
    const Point3 cs = src.center();
    double score = 0.0;
    for (const auto& p : sample_points) {
        const double theta = triangulation_angle(cr, cs, p);
        if (theta >= 0.0)
            score += weight(theta);
    }
    return score;
}

ViewPairing rank_sources(int reference_id, const CameraD& ref, std::span<const Candidate> candidates,
                         std::span<const Point3> sample_points, const AngleWeight& weight)
{
    if (candidates.empty())
        throw std::invalid_argument("view ranking needs at least one candidate");
    if (sample_points.empty())
        throw std::invalid_argument("view ranking needs at least one sample point");
    ViewPairing out;
    out.reference = reference_id;
    std::set<int> seen;
    for (const auto& c : candidates) {
        if (c.id == reference_id)
            continue;
        if (!seen.insert(c.id).second)
            throw std::invalid_argument("duplicate candidate id " + std::to_string(c.id));
        out.ranked_sources.push_back({c.id, pair_score(ref, c.camera, sample_points, weight)});
    }
    std::sort(out.ranked_sources.begin(), out.ranked_sources.end(), [](const ScoredView& a, const ScoredView& b) {
        return a.score > b.score || (a.score == b.score && a.id < b.id);
    });
    return out;
}

std::vector<ViewPairing> parse_pairing(const std::string& content)
{
    const auto tokens = text::tokenize(content);
    std::size_t pos = 0;
    const auto fail = [&](const std::string& what) -> ParseError {
        const std::size_t line = pos < tokens.size() ? tokens[pos].line
                                                     : (tokens.empty() ? 1 : tokens.back().line);
        return ParseError("pair file: " + what, line, ParseError::Unit::Line);
    };
    const auto next_int = [&](const char* what) {
        if (pos >= tokens.size())
            throw fail(std::string("unexpected end of file, expected ") + what);
        const auto v = text::parse_int(tokens[pos].text);
        if (!v)
            throw fail(std::string("expected integer ") + what + ", got '" + std::string(tokens[pos].text) + "'");
        ++pos;
        return *v;
    };

    const long long count = next_int("view count");
    if (count < 0) {
        --pos;
        throw fail("negative view count");
    }
    std::vector<ViewPairing> out;
    std::set<int> refs;
    for (long long v = 0; v < count; ++v) {
        ViewPairing pairing;
        const long long ref = next_int("reference id");
        if (ref < 0 || ref >= count || !refs.insert(int(ref)).second) {
            --pos;
            throw fail("reference id " + std::to_string(ref) + " out of range or repeated");
        }
        pairing.reference = int(ref);
        const long long n = next_int("source count");
        if (n < 0 || n >= count + 1) {
            --pos;
            throw fail("source count " + std::to_string(n) + " out of range");
        }
        std::set<int> ids;
        for (long long s = 0; s < n; ++s) {
            const long long id = next_int("source id");
            if (id < 0 || id >= count || id == ref || !ids.insert(int(id)).second) {
                --pos;
                throw fail("source id " + std::to_string(id) + " invalid for view " + std::to_string(ref));
            }
            if (pos >= tokens.size())
                throw fail("unexpected end of file, expected score");
            const auto score = text::parse_double(tokens[pos].text);
            if (!score || !std::isfinite(*score))
                throw fail("expected finite score, got '" + std::string(tokens[pos].text) + "'");
            if (!pairing.ranked_sources.empty() && *score > pairing.ranked_sources.back().score)
                throw fail("scores must be non-increasing");
            ++pos;
            pairing.ranked_sources.push_back({int(id), *score});
        }
        out.push_back(std::move(pairing));
    }
    if (pos != tokens.size())
        throw fail("trailing content after last view");
    return out;
}

std::string format_pairing(std::span<const ViewPairing> pairings)
{
    std::string out = std::to_string(pairings.size()) + "\n";
    for (const auto& p : pairings) {
        out += std::to_string(p.reference) + "\n" + std::to_string(p.ranked_sources.size());
        for (const auto& s : p.ranked_sources)
            out += " " + std::to_string(s.id) + " " + text::format_double(s.score);
        out += "\n";
    }
    return out;
}

std::vector<ViewPairing> load_pairing(const std::string& path)
{
    return parse_pairing(text::read_file(path));
}

void save_pairing(const std::string& path, std::span<const ViewPairing> pairings)
{
    text::write_file(path, format_pairing(pairings));
}

} // namespace gcmvs
