#pragma once

// Analytic scenes (planes, spheres, a rectangle in front of a plane) rendered
// exactly by ray casting. These are the ground truth for every consistency
// property of the toolkit.

#include "gcmvs/camera.hpp"
#include "gcmvs/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gcmvs {

/// Points X with normal . X = offset (normal is unit length).
struct Plane
{
    Point3 normal = Point3::UnitZ();
    double offset = 600.0;
};

struct Sphere
{
    Point3 center = Point3(0, 0, 600);
    double radius = 100.0;
};

/// Rectangle centered at `center`, spanning +-half_u along axis_u and +-half_v
/// along normal x axis_u.
struct Patch
{
    Point3 center = Point3(0, 0, 500);
    Point3 normal = Point3::UnitZ();
    Point3 axis_u = Point3::UnitX();
    double half_u = 50.0;
    double half_v = 50.0;

    Point3 axis_v() const { return normal.cross(axis_u); }
};

/// An infinite back plane partly hidden by a front rectangle.
struct TwoPlanes
{
    Plane back;
    Patch front;
};

using Geometry = std::variant<Plane, Sphere, TwoPlanes>;

/// Surface ids reported by the renderer.
enum SurfaceId : int { kNoSurface = 0, kPrimarySurface = 1, kFrontSurface = 2 };

struct SceneSpec
{
    Geometry geometry = Plane{};
    std::vector<CameraD> cameras;
    int width = 160;
    int height = 128;
    std::uint64_t seed = 0;
    double noise_stddev = 0.0;  // additive Gaussian depth noise, scene units
};

struct RayHit
{
    double t = 0.0;  // ray parameter of the closest hit
    int surface = kNoSurface;
};

/// Closest hit with t > t_min along origin + t * dir.
RayHit intersect(const Geometry& geometry, const Point3& origin, const Point3& dir, double t_min = 0.0);

/// Distance from `point` to the nearest surface of the geometry.
double distance_to_surface(const Geometry& geometry, const Point3& point);

struct Render
{
    DepthMap depth;
    Image<int> surface;
};

/// Exact depth (camera z) and surface id per pixel of `view`. Noise, when
/// configured, is seeded by (seed, view).
Render render_view(const SceneSpec& spec, int view);
DepthMap render_depth(const SceneSpec& spec, int view);

enum class Visibility : std::uint8_t { NoHit, Visible, Occluded, OutOfView };

/// Ray-cast classification of each reference pixel's surface point as seen
/// from `src`: hidden behind another surface, outside the source image or
/// behind the camera, or visible.
Image<Visibility> classify_visibility(const SceneSpec& spec, int ref, int src);

/// 1 where the reference pixel's point is occluded in `src`.
Mask render_occlusion_truth(const SceneSpec& spec, int ref, int src);

/// Visible in `src` and every source pixel feeding its bilinear sample lies on
/// the same surface as the point.
Mask covisible_mask(const SceneSpec& spec, int ref, int src);

// --- rigs -----------------------------------------------------------------

Mat3<double> make_intrinsics(double focal, int width, int height);

/// Camera at `center` looking at `target`; image y points along -up.
CameraD look_at(const Mat3<double>& K, const Point3& center, const Point3& target,
                const Point3& up = Point3(0, -1, 0));

/// Fronto-parallel cameras translated along x so that a plane at `depth`
/// shifts by integer multiples of `disparity_px`; view order 0, +1, -1, +2, ...
std::vector<CameraD> line_rig(int count, const Mat3<double>& K, double depth, double disparity_px);

/// Cameras on a horizontal arc of radius `distance` around `target`, spaced
/// `step_deg` degrees, with per-camera jitter drawn from `seed`.
std::vector<CameraD> ring_rig(int count, const Mat3<double>& K, const Point3& target, double distance,
                              double step_deg, std::uint64_t seed, double jitter = 0.0);

/// Fronto-parallel cameras pulled back along -z by `pullback` with small
/// lateral offsets, so a plane seen by view 0 stays inside every other view.
std::vector<CameraD> dolly_rig(int count, const Mat3<double>& K, double pullback, double lateral);

enum class ScenePreset { Plane, TiltedPlane, Sphere, TwoPlanes, TwoPlanesOffset, DollyPlane };

/// Named scenes used by the tests, the acceptance suite and `synth`.
SceneSpec make_scene(ScenePreset preset, int width, int height, int views, std::uint64_t seed = 0);

ScenePreset parse_preset(const std::string& name);
std::string preset_name(ScenePreset preset);

/// Back-projection of every valid pixel of every view.
PointCloud scene_point_cloud(const std::vector<DepthMap>& depths, const std::vector<CameraD>& cameras);

/// Geometry and rig summary as JSON.
std::string scene_to_json(const SceneSpec& spec, const std::string& preset);

} // namespace gcmvs
