#pragma once

#include "gcmvs/camera.hpp"
#include "gcmvs/synthetic.hpp"
#include "gcmvs/types.hpp"

#include <Eigen/Geometry>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

namespace testing {

using gcmvs::CameraD;

inline gcmvs::Mat3<double> random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q.toRotationMatrix();
}

/// Camera looking roughly along +z from near the origin, with a small random
/// rotation so that points around z = 600 stay in front.
inline CameraD random_camera(std::mt19937_64& rng, double spread = 0.2)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> focal(300.0, 900.0);
    const Eigen::Vector3d axis(u(rng), u(rng), u(rng));
    const Eigen::Matrix3d R = Eigen::AngleAxisd(spread * u(rng), axis.normalized()).toRotationMatrix();
    CameraD cam;
    cam.K << focal(rng), 0.0, 320.0 + 20.0 * u(rng), 0.0, focal(rng), 240.0 + 20.0 * u(rng), 0.0, 0.0, 1.0;
    cam.E.topLeftCorner<3, 3>() = R;
    cam.E.topRightCorner<3, 1>() = Eigen::Vector3d(50.0 * u(rng), 50.0 * u(rng), 30.0 * u(rng));
    cam.depth_min = 425.0;
    cam.depth_interval = 2.5;
    return cam;
}

inline CameraD simple_camera(double f = 500.0, double cx = 320.0, double cy = 240.0)
{
    CameraD cam;
    cam.K << f, 0.0, cx, 0.0, f, cy, 0.0, 0.0, 1.0;
    return cam;
}

/// Camera with center `center`, axes aligned with the world.
inline CameraD translated_camera(const gcmvs::Point3& center, double f = 500.0, double cx = 320.0, double cy = 240.0)
{
    CameraD cam = simple_camera(f, cx, cy);
    cam.E.topRightCorner<3, 1>() = -center;
    return cam;
}

/// Unique scratch directory removed on destruction.
class TempDir
{
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("gcmvs-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace testing
