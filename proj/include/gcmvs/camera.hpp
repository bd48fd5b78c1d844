#pragma once

// Pinhole camera model. Extrinsics are world-to-camera (MVSNet cam.txt
// convention): x_cam = R * x_world + t. Pixel coordinates are corner
// referenced, so integer coordinates index the raster directly.

#include "gcmvs/error.hpp"
#include "gcmvs/types.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cmath>
#include <string>
#include <vector>

namespace gcmvs {

/// |w| below this is treated as a point at infinity / on the camera plane.
inline constexpr double kHomogeneousEps = 1e-12;

template <class Scalar_>
struct Camera
{
    using Scalar = Scalar_;

    Mat3<Scalar> K = Mat3<Scalar>::Identity();
    Mat4<Scalar> E = Mat4<Scalar>::Identity();
    Scalar depth_min = Scalar(1);
    Scalar depth_interval = Scalar(1);

    Mat3<Scalar> rotation() const { return E.template topLeftCorner<3, 3>(); }
    Vec3<Scalar> translation() const { return E.template topRightCorner<3, 1>(); }
    Scalar fx() const { return K(0, 0); }
    Scalar fy() const { return K(1, 1); }
    Scalar cx() const { return K(0, 2); }
    Scalar cy() const { return K(1, 2); }

    /// Camera center in world coordinates.
    Vec3<Scalar> center() const { return -rotation().transpose() * translation(); }

    template <class Other>
    Camera<Other> cast() const
    {
        Camera<Other> out;
        out.K = K.template cast<Other>();
        out.E = E.template cast<Other>();
        out.depth_min = static_cast<Other>(depth_min);
        out.depth_interval = static_cast<Other>(depth_interval);
        return out;
    }
};

using CameraD = Camera<double>;

/// Human-readable list of invariant violations; empty when the camera is
/// valid. `rotation_tol` bounds |R^T R - I| entry-wise.
template <class Scalar>
std::vector<std::string> camera_issues(const Camera<Scalar>& cam, double rotation_tol = 1e-9)
{
    using std::abs;
    std::vector<std::string> issues;
    const auto& K = cam.K;
    if (K(1, 0) != Scalar(0) || K(2, 0) != Scalar(0) || K(2, 1) != Scalar(0))
        issues.emplace_back("intrinsic matrix is not upper-triangular");
    if (K(2, 2) != Scalar(1))
        issues.emplace_back("intrinsic K[2][2] != 1");
    if (!(K(0, 0) > Scalar(0)) || !(K(1, 1) > Scalar(0)))
        issues.emplace_back("focal lengths must be strictly positive");
    const Mat3<Scalar> R = cam.rotation();
    const double ortho = static_cast<double>(
        (R.transpose() * R - Mat3<Scalar>::Identity()).cwiseAbs().maxCoeff());
    if (!(ortho <= rotation_tol))
        issues.emplace_back("rotation block is not orthonormal (deviation " + std::to_string(ortho) + ")");
    else if (R.determinant() < Scalar(0))
        issues.emplace_back("rotation block has determinant -1");
    const auto bottom = cam.E.template bottomRows<1>();
    if (bottom(0) != Scalar(0) || bottom(1) != Scalar(0) || bottom(2) != Scalar(0) || bottom(3) != Scalar(1))
        issues.emplace_back("extrinsic bottom row is not [0 0 0 1]");
    if (!(cam.depth_min > Scalar(0)))
        issues.emplace_back("depth_min must be > 0");
    if (!(cam.depth_interval > Scalar(0)))
        issues.emplace_back("depth_interval must be > 0");
    return issues;
}

template <class Scalar>
bool is_valid_camera(const Camera<Scalar>& cam, double rotation_tol = 1e-9)
{
    return camera_issues(cam, rotation_tol).empty();
}

namespace detail {

template <class Derived>
auto checked_inverse(const Eigen::MatrixBase<Derived>& m)
{
    using Plain = typename Derived::PlainObject;
    Eigen::FullPivLU<Plain> lu(m.eval());
    if (!lu.isInvertible())
        throw GeometryError("singular camera matrix");
    return Plain(lu.inverse());
}

template <class Scalar>
Mat4<Scalar> lift_intrinsics(const Mat3<Scalar>& K)
{
    Mat4<Scalar> out = Mat4<Scalar>::Identity();
    out.template topLeftCorner<3, 3>() = K;
    return out;
}

} // namespace detail

/// Result of projecting a world point. `in_front` is false when the camera
/// frame depth is not safely positive; pixel and depth are then unspecified.
template <class Scalar>
struct Projection
{
    Vec2<Scalar> pixel = Vec2<Scalar>::Zero();
    Scalar depth = Scalar(0);
    bool in_front = false;
};

/// World point seen at `pixel` with camera-frame depth `depth`.
template <class Scalar>
Vec3<Scalar> back_project(const Vec2<Scalar>& pixel, Scalar depth, const Camera<Scalar>& cam)
{
    const Mat3<Scalar> K_inv = detail::checked_inverse(cam.K);
    const Mat4<Scalar> E_inv = detail::checked_inverse(cam.E);
    const Vec3<Scalar> ray = K_inv * Vec3<Scalar>(pixel.x(), pixel.y(), Scalar(1));
    const Eigen::Matrix<Scalar, 4, 1> cam_point((depth * ray).homogeneous());
    const Eigen::Matrix<Scalar, 4, 1> world = E_inv * cam_point;
    return world.template head<3>() / world(3);
}

template <class Scalar>
Projection<Scalar> project(const Vec3<Scalar>& point, const Camera<Scalar>& cam)
{
    using std::abs;
    Projection<Scalar> out;
    const Eigen::Matrix<Scalar, 4, 1> cam_h = cam.E * point.homogeneous();
    if (abs(cam_h(3)) < Scalar(kHomogeneousEps))
        return out;
    const Vec3<Scalar> cam_point = cam_h.template head<3>() / cam_h(3);
    const Vec3<Scalar> img = cam.K * cam_point;
    if (!(img(2) >= Scalar(kHomogeneousEps)))
        return out;
    out.pixel = img.template head<2>() / img(2);
    out.depth = cam_point(2);
    out.in_front = true;
    return out;
}

/// Composite K_S E_S E_R^-1 K_R^-1 (intrinsics lifted to 4x4) mapping
/// [x d, y d, d, 1] in the reference view to [x' d', y' d', d', 1] in the
/// source view.
template <class Scalar>
Mat4<Scalar> warp_transform(const Camera<Scalar>& ref, const Camera<Scalar>& src)
{
    const Mat4<Scalar> ref_inv = detail::checked_inverse(detail::lift_intrinsics(ref.K));
    const Mat4<Scalar> ext_inv = detail::checked_inverse(ref.E);
    return detail::lift_intrinsics(src.K) * src.E * ext_inv * ref_inv;
}

/// Applies a warp_transform result to one (pixel, depth) pair.
template <class Scalar>
Projection<Scalar> apply_warp(const Mat4<Scalar>& warp, const Vec2<Scalar>& pixel, Scalar depth)
{
    using std::abs;
    Projection<Scalar> out;
    const Eigen::Matrix<Scalar, 4, 1> in(pixel.x() * depth, pixel.y() * depth, depth, Scalar(1));
    const Eigen::Matrix<Scalar, 4, 1> h = warp * in;
    if (abs(h(3)) < Scalar(kHomogeneousEps))
        return out;
    const Scalar z = h(2) / h(3);
    if (!(z >= Scalar(kHomogeneousEps)))
        return out;
    out.pixel = Vec2<Scalar>(h(0) / h(2), h(1) / h(2));
    out.depth = z;
    out.in_front = true;
    return out;
}

} // namespace gcmvs
