#include "gcmvs/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace gcmvs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double intersect_plane(const Point3& normal, double offset, const Point3& origin, const Point3& dir, double t_min)
{
    const double denom = normal.dot(dir);
    if (std::abs(denom) < 1e-15)
        return kInf;
    const double t = (offset - normal.dot(origin)) / denom;
    return t > t_min ? t : kInf;
}

double intersect_sphere(const Sphere& s, const Point3& origin, const Point3& dir, double t_min)
{
    const Point3 oc = origin - s.center;
    const double a = dir.squaredNorm();
    const double b = 2.0 * oc.dot(dir);
    const double c = oc.squaredNorm() - s.radius * s.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0 || a == 0.0)
        return kInf;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double t0 = q / a;
    double t1 = q != 0.0 ? c / q : t0;
    if (t0 > t1)
        std::swap(t0, t1);
    if (t0 > t_min)
        return t0;
    return t1 > t_min ? t1 : kInf;
}

double intersect_patch(const Patch& p, const Point3& origin, const Point3& dir, double t_min)
{
    const double t = intersect_plane(p.normal, p.normal.dot(p.center), origin, dir, t_min);
    if (!std::isfinite(t))
        return kInf;
    const Point3 local = origin + t * dir - p.center;
    if (std::abs(local.dot(p.axis_u)) > p.half_u || std::abs(local.dot(p.axis_v())) > p.half_v)
        return kInf;
    return t;
}

double patch_distance(const Patch& p, const Point3& x)
{
    const Point3 local = x - p.center;
    const double u = local.dot(p.axis_u);
    const double v = local.dot(p.axis_v());
    const double n = local.dot(p.normal);
    const double du = std::max(0.0, std::abs(u) - p.half_u);
    const double dv = std::max(0.0, std::abs(v) - p.half_v);
    return std::sqrt(du * du + dv * dv + n * n);
}

template <class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Point3 pixel_ray(const Mat3<double>& K_inv, const Mat3<double>& R_t, double x, double y)
{
    return R_t * (K_inv * Point3(x, y, 1.0));
}

void check_view(const SceneSpec& spec, int view)
{
    if (view < 0 || view >= static_cast<int>(spec.cameras.size()))
        throw std::out_of_range("view index " + std::to_string(view) + " out of range");
    if (spec.width <= 0 || spec.height <= 0)
        throw std::invalid_argument("scene resolution must be positive");
}

} // namespace

RayHit intersect(const Geometry& geometry, const Point3& origin, const Point3& dir, double t_min)
{
    return std::visit(
        Overloaded{
            [&](const Plane& p) {
                const double t = intersect_plane(p.normal, p.offset, origin, dir, t_min);
                return std::isfinite(t) ? RayHit{t, kPrimarySurface} : RayHit{};
            },
            [&](const Sphere& s) {
                const double t = intersect_sphere(s, origin, dir, t_min);
                return std::isfinite(t) ? RayHit{t, kPrimarySurface} : RayHit{};
            },
            [&](const TwoPlanes& tp) {
                const double tb = intersect_plane(tp.back.normal, tp.back.offset, origin, dir, t_min);
                const double tf = intersect_patch(tp.front, origin, dir, t_min);
                if (tf <= tb && std::isfinite(tf))
                    return RayHit{tf, kFrontSurface};
                if (std::isfinite(tb))
                    return RayHit{tb, kPrimarySurface};
                return RayHit{};
            },
        },
        geometry);
}

double distance_to_surface(const Geometry& geometry, const Point3& x)
{
    return std::visit(Overloaded{
                          [&](const Plane& p) { return std::abs(p.normal.dot(x) - p.offset); },
                          [&](const Sphere& s) { return std::abs((x - s.center).norm() - s.radius); },
                          [&](const TwoPlanes& tp) {
                              return std::min(std::abs(tp.back.normal.dot(x) - tp.back.offset),
                                              patch_distance(tp.front, x));
                          },
                      },
                      geometry);
}

Render render_view(const SceneSpec& spec, int view)
{
    check_view(spec, view);
    const CameraD& cam = spec.cameras[std::size_t(view)];
    const Mat3<double> K_inv = detail::checked_inverse(cam.K);
    const Mat3<double> R_t = cam.rotation().transpose();
    const Point3 origin = cam.center();

    Render out{DepthMap(spec.height, spec.width), Image<int>::Constant(spec.height, spec.width, kNoSurface)};
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c) {
            const RayHit hit = intersect(spec.geometry, origin, pixel_ray(K_inv, R_t, c, r));
            if (hit.surface == kNoSurface)
                continue;
            out.depth.values(r, c) = hit.t;
            out.depth.valid(r, c) = true;
            out.surface(r, c) = hit.surface;
        }

    if (spec.noise_stddev > 0.0) {
        std::mt19937_64 rng(spec.seed * 1000003ull + std::uint64_t(view));
        std::normal_distribution<double> noise(0.0, spec.noise_stddev);
        for (int r = 0; r < spec.height; ++r)
            for (int c = 0; c < spec.width; ++c)
                if (out.depth.valid(r, c)) {
                    const double v = out.depth.values(r, c) + noise(rng);
                    out.depth.values(r, c) = v > 0.0 ? v : 0.0;
                    out.depth.valid(r, c) = v > 0.0;
                }
    }
    return out;
}

DepthMap render_depth(const SceneSpec& spec, int view)
{
    return render_view(spec, view).depth;
}

namespace {

struct PointTruth
{
    Visibility visibility = Visibility::NoHit;
    int surface = kNoSurface;
    Pixel landing = Pixel::Zero();
};

template <class Fn>
void for_each_reference_point(const SceneSpec& spec, int ref, int src, Fn&& fn)
{
    check_view(spec, ref);
    check_view(spec, src);
    const CameraD& rc = spec.cameras[std::size_t(ref)];
    const CameraD& sc = spec.cameras[std::size_t(src)];
    const Mat3<double> K_inv = detail::checked_inverse(rc.K);
    const Mat3<double> R_t = rc.rotation().transpose();
    const Point3 origin = rc.center();
    const Point3 src_center = sc.center();

    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c) {
            PointTruth truth;
            const RayHit hit = intersect(spec.geometry, origin, pixel_ray(K_inv, R_t, c, r));
            if (hit.surface != kNoSurface) {
                truth.surface = hit.surface;
                const Point3 x = origin + hit.t * pixel_ray(K_inv, R_t, c, r);
                const auto proj = project(x, sc);
                if (!proj.in_front || !(proj.pixel.x() >= 0.0 && proj.pixel.y() >= 0.0 &&
                                        proj.pixel.x() <= spec.width - 1 && proj.pixel.y() <= spec.height - 1)) {
                    truth.visibility = Visibility::OutOfView;
                } else {
                    truth.landing = proj.pixel;
                    const RayHit blocker = intersect(spec.geometry, src_center, x - src_center, 1e-9);
                    truth.visibility = blocker.surface != kNoSurface && blocker.t < 1.0 - 1e-9 ? Visibility::Occluded
                                                                                               : Visibility::Visible;
                }
            }
            fn(r, c, truth);
        }
}

} // namespace

Image<Visibility> classify_visibility(const SceneSpec& spec, int ref, int src)
{
    Image<Visibility> out(spec.height, spec.width);
    for_each_reference_point(spec, ref, src, [&](int r, int c, const PointTruth& t) { out(r, c) = t.visibility; });
    return out;
}

Mask render_occlusion_truth(const SceneSpec& spec, int ref, int src)
{
    Mask out(spec.height, spec.width);
    for_each_reference_point(spec, ref, src,
                             [&](int r, int c, const PointTruth& t) { out(r, c) = t.visibility == Visibility::Occluded; });
    return out;
}

Mask covisible_mask(const SceneSpec& spec, int ref, int src)
{
    SceneSpec clean = spec;
    clean.noise_stddev = 0.0;
    const Render src_render = render_view(clean, src);
    Mask out = Mask::Constant(spec.height, spec.width, false);
    for_each_reference_point(spec, ref, src, [&](int r, int c, const PointTruth& t) {
        if (t.visibility != Visibility::Visible)
            return;
        const double x = t.landing.x();
        const double y = t.landing.y();
        const int x0 = int(std::floor(x));
        const int y0 = int(std::floor(y));
        const int x1 = x > x0 ? x0 + 1 : x0;
        const int y1 = y > y0 ? y0 + 1 : y0;
        out(r, c) = src_render.surface(y0, x0) == t.surface && src_render.surface(y0, x1) == t.surface &&
                    src_render.surface(y1, x0) == t.surface && src_render.surface(y1, x1) == t.surface;
    });
    return out;
}

Mat3<double> make_intrinsics(double focal, int width, int height)
{
    Mat3<double> K = Mat3<double>::Identity();
    K(0, 0) = focal;
    K(1, 1) = focal;
    K(0, 2) = width / 2.0;
    K(1, 2) = height / 2.0;
    return K;
}

CameraD look_at(const Mat3<double>& K, const Point3& center, const Point3& target, const Point3& up)
{
    const Point3 z = (target - center).normalized();
    const Point3 x = (-up).cross(z).normalized();
    const Point3 y = z.cross(x);
    CameraD cam;
    cam.K = K;
    Mat3<double> R;
    R.row(0) = x.transpose();
    R.row(1) = y.transpose();
    R.row(2) = z.transpose();
    cam.E.topLeftCorner<3, 3>() = R;
    cam.E.topRightCorner<3, 1>() = -R * center;
    cam.depth_min = 425.0;
    cam.depth_interval = 2.65;
    return cam;
}

namespace {

/// 0, +1, -1, +2, -2, ...
int signed_slot(int i)
{
    return i % 2 == 1 ? (i + 1) / 2 : -(i / 2);
}

} // namespace

std::vector<CameraD> line_rig(int count, const Mat3<double>& K, double depth, double disparity_px)
{
    const double baseline = disparity_px * depth / K(0, 0);
    std::vector<CameraD> out;
    for (int i = 0; i < count; ++i)
        out.push_back(look_at(K, Point3(signed_slot(i) * baseline, 0, 0), Point3(signed_slot(i) * baseline, 0, depth)));
    return out;
}

std::vector<CameraD> ring_rig(int count, const Mat3<double>& K, const Point3& target, double distance,
                              double step_deg, std::uint64_t seed, double jitter)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<CameraD> out;
    for (int i = 0; i < count; ++i) {
        const double angle = signed_slot(i) * step_deg * std::numbers::pi / 180.0;
        Point3 center = target + distance * Point3(std::sin(angle), 0.0, -std::cos(angle));
        Point3 aim = target;
        if (i > 0 && jitter > 0.0) {
            center += jitter * Point3(unit(rng), unit(rng), unit(rng));
            aim += jitter * Point3(unit(rng), unit(rng), unit(rng));
        }
        out.push_back(look_at(K, center, aim));
    }
    return out;
}

std::vector<CameraD> dolly_rig(int count, const Mat3<double>& K, double pullback, double lateral)
{
    std::vector<CameraD> out;
    for (int i = 0; i < count; ++i) {
        Point3 center = Point3::Zero();
        if (i > 0) {
            const double angle = 2.0 * std::numbers::pi * double(i - 1) / double(std::max(1, count - 1));
            center = Point3(lateral * std::cos(angle), lateral * std::sin(angle), -pullback * (1.0 + 0.25 * (i % 2)));
        }
        out.push_back(look_at(K, center, center + Point3::UnitZ()));
    }
    return out;
}

SceneSpec make_scene(ScenePreset preset, int width, int height, int views, std::uint64_t seed)
{
    if (views < 2)
        throw std::invalid_argument("a scene needs at least two views");
    SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.seed = seed;
    // Rings use a longer lens: bilinear sampling of depth is exact only where
    // depth is affine in the pixel grid, and the residual grows with the
    // squared per-pixel depth gradient.
    const Mat3<double> K = make_intrinsics(1.25 * width, width, height);
    const Mat3<double> K_ring = make_intrinsics(2.0 * width, width, height);
    const Point3 target(0, 0, 600);
    switch (preset) {
    case ScenePreset::Plane:
        spec.geometry = Plane{Point3::UnitZ(), 600.0};
        spec.cameras = line_rig(views, K, 600.0, 2.0);
        break;
    case ScenePreset::DollyPlane:
        spec.geometry = Plane{Point3::UnitZ(), 600.0};
        spec.cameras = dolly_rig(views, K, 60.0, 10.0);
        break;
    case ScenePreset::TiltedPlane: {
        const double tilt = 15.0 * std::numbers::pi / 180.0;
        const Point3 n(std::sin(tilt), 0.0, std::cos(tilt));
        spec.geometry = Plane{n, n.dot(target)};
        spec.cameras = ring_rig(views, K_ring, target, 600.0, 4.0, seed, 2.0);
        break;
    }
    case ScenePreset::Sphere:
        spec.geometry = Sphere{Point3(0, 0, 600.0 + 4000.0), 4000.0};
        spec.cameras = ring_rig(views, K_ring, target, 600.0, 4.0, seed, 2.0);
        break;
    case ScenePreset::TwoPlanes: {
        TwoPlanes tp;
        tp.back = Plane{Point3::UnitZ(), 700.0};
        tp.front.center = Point3(0, 0, 520);
        tp.front.half_u = 80.0;
        tp.front.half_v = 60.0;
        spec.geometry = tp;
        spec.cameras = ring_rig(views, K_ring, target, 600.0, 5.0, seed, 2.0);
        break;
    }
    case ScenePreset::TwoPlanesOffset: {
        TwoPlanes tp;
        const double tilt = 10.0 * std::numbers::pi / 180.0;
        tp.back = Plane{Point3(0.0, std::sin(tilt), std::cos(tilt)), 720.0};
        tp.front.center = Point3(-40, 25, 540);
        tp.front.normal = Point3(std::sin(tilt), 0.0, std::cos(tilt));
        tp.front.axis_u = Point3(std::cos(tilt), 0.0, -std::sin(tilt));
        tp.front.half_u = 60.0;
        tp.front.half_v = 45.0;
        spec.geometry = tp;
        spec.cameras = ring_rig(views, K_ring, target, 620.0, 5.0, seed + 17, 2.0);
        break;
    }
    }
    return spec;
}

ScenePreset parse_preset(const std::string& name)
{
    if (name == "plane") return ScenePreset::Plane;
    if (name == "dolly-plane") return ScenePreset::DollyPlane;
    if (name == "tilted-plane") return ScenePreset::TiltedPlane;
    if (name == "sphere") return ScenePreset::Sphere;
    if (name == "two-planes") return ScenePreset::TwoPlanes;
    if (name == "two-planes-offset") return ScenePreset::TwoPlanesOffset;
    throw std::invalid_argument("unknown scene preset '" + name + "'");
}

std::string preset_name(ScenePreset preset)
{
    switch (preset) {
    case ScenePreset::Plane: return "plane";
    case ScenePreset::DollyPlane: return "dolly-plane";
    case ScenePreset::TiltedPlane: return "tilted-plane";
    case ScenePreset::Sphere: return "sphere";
    case ScenePreset::TwoPlanes: return "two-planes";
    case ScenePreset::TwoPlanesOffset: return "two-planes-offset";
    }
    return "unknown";
}

PointCloud scene_point_cloud(const std::vector<DepthMap>& depths, const std::vector<CameraD>& cameras)
{
    if (depths.size() != cameras.size())
        throw std::invalid_argument("depth map count differs from camera count");
    PointCloud cloud;
    for (std::size_t v = 0; v < depths.size(); ++v) {
        const auto& d = depths[v];
        for (Eigen::Index r = 0; r < d.height(); ++r)
            for (Eigen::Index c = 0; c < d.width(); ++c)
                if (d.valid(r, c))
                    cloud.points.push_back(back_project(Pixel(double(c), double(r)), d.values(r, c), cameras[v]));
    }
    return cloud;
}

std::string scene_to_json(const SceneSpec& spec, const std::string& preset)
{
    using nlohmann::json;
    const auto vec = [](const Point3& p) { return json::array({p.x(), p.y(), p.z()}); };
    json j;
    j["version"] = 1;
    j["preset"] = preset;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["views"] = spec.cameras.size();
    j["seed"] = spec.seed;
    j["noise_stddev"] = spec.noise_stddev;
    std::visit(Overloaded{
                   [&](const Plane& p) {
                       j["geometry"] = {{"type", "plane"}, {"normal", vec(p.normal)}, {"offset", p.offset}};
                   },
                   [&](const Sphere& s) {
                       j["geometry"] = {{"type", "sphere"}, {"center", vec(s.center)}, {"radius", s.radius}};
                   },
                   [&](const TwoPlanes& tp) {
                       j["geometry"] = {{"type", "two_planes"},
                                        {"back", {{"normal", vec(tp.back.normal)}, {"offset", tp.back.offset}}},
                                        {"front",
                                         {{"center", vec(tp.front.center)},
                                          {"normal", vec(tp.front.normal)},
                                          {"axis_u", vec(tp.front.axis_u)},
                                          {"half_u", tp.front.half_u},
                                          {"half_v", tp.front.half_v}}}};
                   },
               },
               spec.geometry);
    return j.dump(2);
}

} // namespace gcmvs
