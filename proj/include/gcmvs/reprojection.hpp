#pragma once

// Forward-backward reprojection of a reference depth map through one source
// view: warp reference pixels into the source, sample the source depth there,
// and carry the sampled surface point back into the reference view.

#include "gcmvs/camera.hpp"
#include "gcmvs/types.hpp"

#include <optional>

namespace gcmvs {

/// A depth map paired with the camera that observed it.
struct View
{
    DepthMap depth;
    CameraD camera;
};

struct ForwardWarp
{
    CoordinateGrid coords;  // landing position in the source view
    DepthMap depth;         // depth of the warped point in the source frame
};

struct Reprojection
{
    DepthMap depth;         // D'' : reprojected depth in the reference frame
    CoordinateGrid pixels;  // P'' : reprojected pixel in the reference view
    CoordinateGrid landing; // P'  : forward-warped position in the source view
};

/// Warps every valid reference pixel into `src`. Pixels landing behind the
/// source camera are invalid in both outputs.
ForwardWarp forward_project(const DepthMap& d_ref, const CameraD& ref, const CameraD& src, int threads = 1);

/// Bilinear sample at continuous (x, y). Empty when the position is outside
/// [0, W-1] x [0, H-1] or a neighbor carrying non-zero weight is invalid.
/// Exact at lattice positions.
std::optional<double> sample_bilinear(const DepthMap& map, double x, double y);

/// output(r, c) = sample_bilinear(src_map, coords.x(r, c), coords.y(r, c)).
DepthMap remap(const DepthMap& src_map, const CoordinateGrid& coords, int threads = 1);

/// forward_project -> remap(d_src_gt) -> back-project the remapped source
/// depth through `src` and project it into `ref`. The output valid set is a
/// subset of d_ref.valid.
Reprojection fbr(const DepthMap& d_ref, const CameraD& ref, const DepthMap& d_src_gt, const CameraD& src,
                 int threads = 1);

} // namespace gcmvs
