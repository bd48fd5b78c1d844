#pragma once

// Readers and writers for PFM rasters, MVSNet cam.txt, PLY point clouds and
// the probability-volume container. Readers reject malformed input with a
// ParseError carrying a byte offset (binary) or line number (text).

#include "gcmvs/camera.hpp"
#include "gcmvs/loss.hpp"
#include "gcmvs/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gcmvs {

using Bytes = std::vector<std::uint8_t>;

// --- PFM ------------------------------------------------------------------

/// Float raster; `data` is row-major with row 0 at the top of the image
/// (files store rows bottom-up).
struct PfmImage
{
    int width = 0;
    int height = 0;
    int channels = 1;
    float scale = -1.0f;  // sign encodes byte order: negative = little-endian
    std::vector<float> data;

    float& at(int row, int col, int ch = 0) { return data[std::size_t((row * width + col) * channels + ch)]; }
    float at(int row, int col, int ch = 0) const { return data[std::size_t((row * width + col) * channels + ch)]; }
};

PfmImage read_pfm(std::span<const std::uint8_t> bytes);
/// Always little-endian: the header scale is written as -|scale|.
Bytes write_pfm(const PfmImage& image);

PfmImage pfm_from_grid(const Grid& grid);
/// Single-channel image as a depth map; non-finite or non-positive values
/// become invalid.
DepthMap depth_from_pfm(const PfmImage& image);
Grid grid_from_pfm(const PfmImage& image);

PfmImage load_pfm(const std::string& path);
void save_pfm(const std::string& path, const PfmImage& image);

// --- cam.txt --------------------------------------------------------------

/// Parses "extrinsic" (4x4), "intrinsic" (3x3) and the depth line
/// "depth_min depth_interval [num_depth depth_max]". Cameras violating the
/// camera invariants (rotation tolerance 1e-3) are returned with the problems
/// appended to `warnings`.
CameraD parse_cam(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string format_cam(const CameraD& cam);

CameraD load_cam(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_cam(const std::string& path, const CameraD& cam);

// --- PLY ------------------------------------------------------------------

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Vertex-only PLY with float x, y, z and optional uchar red, green, blue.
Bytes write_ply(const PointCloud& cloud, PlyFormat format = PlyFormat::BinaryLittleEndian);
/// Accepts ascii and binary (either byte order) vertex elements with scalar
/// properties; x, y, z are required, red/green/blue and confidence optional.
PointCloud read_ply(std::span<const std::uint8_t> bytes);

PointCloud load_ply(const std::string& path);
void save_ply(const std::string& path, const PointCloud& cloud, PlyFormat format = PlyFormat::BinaryLittleEndian);

// --- probability volume ---------------------------------------------------

/// Little-endian container:
///   "GCPV" | u32 version (1) | u32 D | u32 H | u32 W | u32 mode (0 shared, 1 per pixel)
///   | f32 hypotheses (D, or D*H*W) | f32 probabilities (D*H*W, hypothesis-major)
Bytes write_volume(const ProbabilityVolume& vol);
ProbabilityVolume read_volume(std::span<const std::uint8_t> bytes);

ProbabilityVolume load_volume(const std::string& path);
void save_volume(const std::string& path, const ProbabilityVolume& vol);

Bytes read_bytes(const std::string& path);
void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

} // namespace gcmvs
