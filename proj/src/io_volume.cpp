#include "gcmvs/io.hpp"

#include "byte_io.hpp"

#include <cmath>
#include <cstring>

namespace gcmvs {

namespace {

constexpr std::uint32_t kVolumeVersion = 1;
constexpr std::uint32_t kMaxExtent = 1u << 16;

} // namespace

Bytes write_volume(const ProbabilityVolume& vol)
{
    vol.check_shape();
    Bytes out;
    detail::append_text(out, "GCPV");
    detail::append_le<std::uint32_t>(out, kVolumeVersion);
    detail::append_le<std::uint32_t>(out, std::uint32_t(vol.depth_count()));
    detail::append_le<std::uint32_t>(out, std::uint32_t(vol.height()));
    detail::append_le<std::uint32_t>(out, std::uint32_t(vol.width()));
    detail::append_le<std::uint32_t>(out, vol.per_pixel() ? 1u : 0u);
    if (vol.per_pixel()) {
        for (const auto& slice : vol.pixel_hypotheses)
            for (Eigen::Index r = 0; r < slice.rows(); ++r)
                for (Eigen::Index c = 0; c < slice.cols(); ++c)
                    detail::append_le(out, static_cast<float>(slice(r, c)));
    } else {
        for (double h : vol.shared_hypotheses)
            detail::append_le(out, static_cast<float>(h));
    }
    for (const auto& slice : vol.probs)
        for (Eigen::Index r = 0; r < slice.rows(); ++r)
            for (Eigen::Index c = 0; c < slice.cols(); ++c)
                detail::append_le(out, static_cast<float>(slice(r, c)));
    return out;
}

ProbabilityVolume read_volume(std::span<const std::uint8_t> bytes)
{
    detail::ByteCursor cur(bytes, "probability volume");
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "GCPV", 4) != 0)
        cur.fail("bad magic, expected 'GCPV'");
    cur.skip(4);
    const std::size_t version_at = cur.offset();
    if (cur.read<std::uint32_t>(true) != kVolumeVersion)
        cur.fail_at("unsupported version", version_at);
    const std::size_t dims_at = cur.offset();
    const std::uint32_t depth = cur.read<std::uint32_t>(true);
    const std::uint32_t height = cur.read<std::uint32_t>(true);
    const std::uint32_t width = cur.read<std::uint32_t>(true);
    if (depth < 2 || height == 0 || width == 0 || depth > kMaxExtent || height > kMaxExtent || width > kMaxExtent)
        cur.fail_at("invalid dimensions", dims_at);
    const std::size_t mode_at = cur.offset();
    const std::uint32_t mode = cur.read<std::uint32_t>(true);
    if (mode > 1)
        cur.fail_at("invalid hypothesis mode", mode_at);

    const std::size_t plane = std::size_t(height) * width;
    const std::size_t hyp_count = mode == 1 ? plane * depth : depth;
    const std::size_t expected = (hyp_count + plane * depth) * sizeof(float);
    if (cur.remaining() < expected)
        cur.fail("truncated payload: expected " + std::to_string(expected) + " bytes");
    if (cur.remaining() > expected)
        cur.fail_at("trailing bytes after payload", cur.offset() + expected);

    const auto read_slice = [&](Grid& g) {
        g.resize(height, width);
        for (Eigen::Index r = 0; r < g.rows(); ++r)
            for (Eigen::Index c = 0; c < g.cols(); ++c) {
                const std::size_t at = cur.offset();
                const float v = cur.read<float>(true);
                if (!std::isfinite(v))
                    cur.fail_at("non-finite value", at);
                g(r, c) = v;
            }
    };

    ProbabilityVolume vol;
    if (mode == 1) {
        vol.pixel_hypotheses.resize(depth);
        for (auto& g : vol.pixel_hypotheses)
            read_slice(g);
    } else {
        vol.shared_hypotheses.resize(depth);
        for (auto& h : vol.shared_hypotheses) {
            const std::size_t at = cur.offset();
            const float v = cur.read<float>(true);
            if (!std::isfinite(v))
                cur.fail_at("non-finite hypothesis", at);
            h = v;
        }
    }
    vol.probs.resize(depth);
    for (auto& g : vol.probs)
        read_slice(g);
    try {
        vol.check_shape();
    } catch (const std::invalid_argument& e) {
        cur.fail_at(e.what(), 24);
    }
    return vol;
}

ProbabilityVolume load_volume(const std::string& path)
{
    return read_volume(read_bytes(path));
}

void save_volume(const std::string& path, const ProbabilityVolume& vol)
{
    write_bytes(path, write_volume(vol));
}

} // namespace gcmvs
