#pragma once

// Source-view ranking by triangulation-angle score and the pair.txt format.

#include "gcmvs/camera.hpp"
#include "gcmvs/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace gcmvs {

struct ScoredView
{
    int id = 0;
    double score = 0.0;

    bool operator==(const ScoredView&) const = default;
};

struct ViewPairing
{
    int reference = 0;
    std::vector<ScoredView> ranked_sources;

    /// First min(m, size) source ids.
    std::vector<int> top(std::size_t m) const;

    bool operator==(const ViewPairing&) const = default;
};

struct Candidate
{
    int id = 0;
    CameraD camera;
};

/// Piecewise Gaussian in the triangulation angle (degrees): width sigma_low
/// below theta0, sigma_high above it.
struct AngleWeight
{
    double theta0 = 5.0;
    double sigma_low = 1.0;
    double sigma_high = 10.0;

    double operator()(double theta_deg) const;
};

/// Angle in degrees between the rays from the two centers to `point`; empty
/// contribution (returns a negative value) when either center coincides with
/// the point.
double triangulation_angle(const Point3& center_a, const Point3& center_b, const Point3& point);

/// Score of one candidate: sum of weight(angle) over the sample points.
double pair_score(const CameraD& ref, const CameraD& src, std::span<const Point3> sample_points,
                  const AngleWeight& weight = {});

/// Candidates sorted by descending score, ties broken by ascending id.
/// Candidates sharing the reference id are dropped.
ViewPairing rank_sources(int reference_id, const CameraD& ref, std::span<const Candidate> candidates,
                         std::span<const Point3> sample_points, const AngleWeight& weight = {});

/// Parses pair.txt: view count, then per view its id, the source count and
/// alternating source id / score. Throws ParseError with a line number.
std::vector<ViewPairing> parse_pairing(const std::string& text);
std::string format_pairing(std::span<const ViewPairing> pairings);

std::vector<ViewPairing> load_pairing(const std::string& path);
void save_pairing(const std::string& path, std::span<const ViewPairing> pairings);

} // namespace gcmvs
