#include "gcmvs/error.hpp"
#include "gcmvs/io.hpp"
#include "gcmvs/view_selection.hpp"

#include "support.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace gcmvs;

namespace {

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

void append_f32(Bytes& out, float v, bool little = true)
{
    std::uint8_t raw[4];
    std::memcpy(raw, &v, 4);
    if (little != (std::endian::native == std::endian::little))
        std::swap(raw[0], raw[3]), std::swap(raw[1], raw[2]);
    out.insert(out.end(), raw, raw + 4);
}

Bytes with_floats(const std::string& header, std::initializer_list<float> values, bool little = true)
{
    Bytes out = bytes_of(header);
    for (float v : values)
        append_f32(out, v, little);
    return out;
}

Bytes with_zero_bytes(const std::string& header, std::size_t n)
{
    Bytes out = bytes_of(header);
    out.resize(out.size() + n, 0);
    return out;
}

template <class F>
void expect_parse_error(F&& f, ParseError::Unit unit, std::size_t location)
{
    try {
        f();
        FAIL("accepted malformed input");
    } catch (const ParseError& e) {
        CHECK(e.unit() == unit);
        CHECK(e.location() == location);
        CHECK(std::string(e.what()).find(unit == ParseError::Unit::Byte ? "(at byte " : "(at line ") !=
              std::string::npos);
    }
}

std::string canonical_cam(const std::string& depth_line = "425 2.5")
{
    return "extrinsic\n"
           "1 0 0 0\n"
           "0 1 0 0\n"
           "0 0 1 0\n"
           "0 0 0 1\n"
           "\n"
           "intrinsic\n"
           "500 0 320\n"
           "0 500 240\n"
           "0 0 1\n"
           "\n" +
           depth_line + "\n";
}

const std::string kPlyAsciiHeader =
    "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
const std::string kPlyBinaryHeader = "ply\nformat binary_little_endian 1.0\nelement vertex 2\nproperty float x\n"
                                     "property float y\nproperty float z\nend_header\n";

} // namespace

TEST_CASE("single-pixel zero pfm")
{
    const PfmImage img = read_pfm(with_floats("Pf\n1 1\n-1.0\n", {0.0f}));
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    CHECK(img.channels == 1);
    CHECK(img.scale == -1.0f);
    REQUIRE(img.data.size() == 1);
    CHECK(img.data[0] == 0.0f);
}

TEST_CASE("pfm rows are stored bottom-up")
{
    const Bytes file = with_floats("Pf\n2 2\n-1\n", {3.0f, 4.0f, 1.0f, 2.0f});
    const PfmImage img = read_pfm(file);
    CHECK(img.at(0, 0) == 1.0f);
    CHECK(img.at(0, 1) == 2.0f);
    CHECK(img.at(1, 0) == 3.0f);
    CHECK(img.at(1, 1) == 4.0f);
    CHECK(write_pfm(img) == file);

    Grid g(2, 2);
    g << 1, 2, 3, 4;
    CHECK(write_pfm(pfm_from_grid(g)) == file);
    CHECK((grid_from_pfm(img) == g).all());
}

TEST_CASE("big-endian pfm is honored and rewritten little-endian")
{
    const Bytes be = with_floats("Pf\n2 1\n1.0\n", {1.5f, -2.25f}, false);
    const PfmImage img = read_pfm(be);
    CHECK(img.scale == 1.0f);
    CHECK(img.at(0, 0) == 1.5f);
    CHECK(img.at(0, 1) == -2.25f);
    CHECK(write_pfm(img) == with_floats("Pf\n2 1\n-1\n", {1.5f, -2.25f}));
}

TEST_CASE("three-channel pfm")
{
    const Bytes file = with_floats("PF\n1 2\n-1\n", {4, 5, 6, 1, 2, 3});
    const PfmImage img = read_pfm(file);
    CHECK(img.channels == 3);
    CHECK(img.at(0, 0, 2) == 3.0f);
    CHECK(img.at(1, 0, 0) == 4.0f);
    CHECK(write_pfm(img) == file);
    CHECK_THROWS_AS(grid_from_pfm(img), std::invalid_argument);
}

TEST_CASE("pfm round trips on random instances")
{
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> dim(1, 40), ch(0, 1);
    std::uniform_real_distribution<float> v(-1e6f, 1e6f);
    for (int trial = 0; trial < 100; ++trial) {
        PfmImage img;
        img.width = dim(rng);
        img.height = dim(rng);
        img.channels = ch(rng) ? 3 : 1;
        img.scale = -1.0f;
        img.data.resize(std::size_t(img.width * img.height * img.channels));
        for (auto& x : img.data)
            x = v(rng);
        if (trial % 10 == 0)
            img.data[0] = std::numeric_limits<float>::infinity();
        const Bytes bytes = write_pfm(img);
        const PfmImage back = read_pfm(bytes);
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.channels == img.channels);
        CHECK(std::memcmp(back.data.data(), img.data.data(), img.data.size() * 4) == 0);
        CHECK(write_pfm(back) == bytes);
    }
}

TEST_CASE("pfm depth maps mark non-positive values invalid")
{
    Grid g(1, 3);
    g << 0.0, 600.0, -1.0;
    const DepthMap d = depth_from_pfm(pfm_from_grid(g));
    CHECK_FALSE(d.valid(0, 0));
    CHECK(d.valid(0, 1));
    CHECK_FALSE(d.valid(0, 2));
}

TEST_CASE("malformed pfm files report byte offsets")
{
    using U = ParseError::Unit;
    expect_parse_error([] { read_pfm(Bytes{}); }, U::Byte, 0);
    expect_parse_error([] { read_pfm(bytes_of("P6\n1 1\n255\n")); }, U::Byte, 0);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf2 2\n-1\n", 16)); }, U::Byte, 2);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\nx 2\n-1\n", 16)); }, U::Byte, 3);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n0 2\n-1\n", 16)); }, U::Byte, 3);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n2 -2\n-1\n", 16)); }, U::Byte, 5);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n2 2\n0\n", 16)); }, U::Byte, 7);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n2 2\nabc\n", 16)); }, U::Byte, 7);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n2 2\ninf\n", 16)); }, U::Byte, 7);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n2 2\n-1\n", 15)); }, U::Byte, 10);
    expect_parse_error([] { read_pfm(with_zero_bytes("Pf\n2 2\n-1\n", 17)); }, U::Byte, 26);
    expect_parse_error([] { read_pfm(bytes_of("Pf\n2 2\n-1")); }, U::Byte, 9);
    expect_parse_error([] { read_pfm(bytes_of("Pf\n2")); }, U::Byte, 4);
    expect_parse_error([] { read_pfm(with_zero_bytes("PF\n2 2\n-1\n", 16)); }, U::Byte, 10);
}

TEST_CASE("canonical cam file")
{
    const CameraD cam = parse_cam(canonical_cam());
    CHECK(cam.E == Mat4<double>::Identity());
    CHECK(cam.K(0, 0) == 500.0);
    CHECK(cam.K(0, 2) == 320.0);
    CHECK(cam.K(1, 2) == 240.0);
    CHECK(cam.depth_min == 425.0);
    CHECK(cam.depth_interval == 2.5);

    const CameraD long_line = parse_cam(canonical_cam("425 2.5 192 905"));
    CHECK(long_line.depth_min == 425.0);
    CHECK(long_line.depth_interval == 2.5);
}

TEST_CASE("cam files with bad rotations parse with warnings")
{
    std::string text = canonical_cam();
    text.replace(text.find("1 0 0 0"), 7, "1 0.01 0 0");
    std::vector<std::string> warnings;
    const CameraD cam = parse_cam(text, &warnings);
    CHECK(cam.E(0, 1) == 0.01);
    CHECK_FALSE(warnings.empty());

    std::vector<std::string> none;
    parse_cam(canonical_cam(), &none);
    CHECK(none.empty());
}

TEST_CASE("cam round trips on random cameras")
{
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> dmin(1.0, 1000.0), di(0.01, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        CameraD cam = testing::random_camera(rng, 3.0);
        cam.depth_min = dmin(rng);
        cam.depth_interval = di(rng);
        std::vector<std::string> warnings;
        const CameraD back = parse_cam(format_cam(cam), &warnings);
        CHECK(warnings.empty());
        CHECK(back.E == cam.E);
        CHECK(back.K == cam.K);
        CHECK(back.depth_min == cam.depth_min);
        CHECK(back.depth_interval == cam.depth_interval);
    }
    testing::TempDir dir;
    const CameraD cam = testing::random_camera(rng);
    save_cam(dir / "00000000_cam.txt", cam);
    CHECK(load_cam(dir / "00000000_cam.txt").E == cam.E);
}

TEST_CASE("malformed cam files report line numbers")
{
    using U = ParseError::Unit;
    const auto with = [](const std::string& from, const std::string& to) {
        std::string t = canonical_cam();
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    expect_parse_error([] { parse_cam(""); }, U::Line, 1);
    expect_parse_error([&] { parse_cam(with("extrinsic", "intrinsic")); }, U::Line, 1);
    expect_parse_error([&] { parse_cam(with("0 1 0 0\n", "0 1 0\n")); }, U::Line, 7);
    expect_parse_error([&] { parse_cam(with("0 0 1 0\n", "0 0 abc 0\n")); }, U::Line, 4);
    expect_parse_error([] { parse_cam("extrinsic\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n"); }, U::Line, 5);
    expect_parse_error([&] { parse_cam(with("0 500 240", "0 nan 240")); }, U::Line, 9);
    expect_parse_error([&] { parse_cam(with("intrinsic", "intrinsics")); }, U::Line, 7);
    expect_parse_error([&] { parse_cam(with("425 2.5\n", "")); }, U::Line, 10);
    expect_parse_error([] { parse_cam(canonical_cam("425")); }, U::Line, 12);
    expect_parse_error([] { parse_cam(canonical_cam("425 2.5 192 905 1")); }, U::Line, 12);
    expect_parse_error([] { parse_cam(canonical_cam("425 2.5\nextra")); }, U::Line, 13);
    expect_parse_error([] { parse_cam(canonical_cam("0 2.5")); }, U::Line, 12);
    expect_parse_error([] { parse_cam(canonical_cam("425 -2.5")); }, U::Line, 12);
}

TEST_CASE("pair round trips on random instances")
{
    std::mt19937_64 rng(63);
    std::uniform_int_distribution<int> views(1, 30);
    std::uniform_real_distribution<double> drop(0.0, 500.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = views(rng);
        std::vector<ViewPairing> pairings;
        for (int v = 0; v < n; ++v) {
            ViewPairing p;
            p.reference = v;
            std::vector<int> ids;
            for (int s = 0; s < n; ++s)
                if (s != v)
                    ids.push_back(s);
            std::shuffle(ids.begin(), ids.end(), rng);
            ids.resize(std::uniform_int_distribution<std::size_t>(0, ids.size())(rng));
            double score = 1e4 * drop(rng);
            for (int id : ids) {
                p.ranked_sources.push_back({id, score});
                score -= drop(rng);
            }
            pairings.push_back(std::move(p));
        }
        CHECK(parse_pairing(format_pairing(pairings)) == pairings);
    }
}

TEST_CASE("ply round trips on random instances")
{
    std::mt19937_64 rng(64);
    std::uniform_int_distribution<int> count(0, 300), byte(0, 255);
    std::uniform_real_distribution<float> v(-1e4f, 1e4f);
    for (int trial = 0; trial < 100; ++trial) {
        PointCloud cloud;
        const int n = count(rng);
        const bool colored = trial % 2 == 0;
        for (int i = 0; i < n; ++i) {
            cloud.points.emplace_back(v(rng), v(rng), v(rng));
            if (colored)
                cloud.colors.push_back({std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))});
        }
        for (auto format : {PlyFormat::BinaryLittleEndian, PlyFormat::Ascii}) {
            const Bytes bytes = write_ply(cloud, format);
            const PointCloud back = read_ply(bytes);
            CHECK(back.points == cloud.points);
            CHECK(back.colors == cloud.colors);
            CHECK(write_ply(back, format) == bytes);
        }
    }
}

TEST_CASE("ply reader accepts other layouts")
{
    Bytes be = bytes_of("ply\nformat binary_big_endian 1.0\ncomment made by hand\nelement vertex 1\n"
                        "property double confidence\nproperty float x\nproperty float y\nproperty float z\n"
                        "element face 0\nproperty list uchar int vertex_indices\nend_header\n");
    const double conf = 0.75;
    std::uint8_t raw[8];
    std::memcpy(raw, &conf, 8);
    if (std::endian::native == std::endian::little)
        std::reverse(raw, raw + 8);
    be.insert(be.end(), raw, raw + 8);
    for (float f : {1.0f, 2.0f, 3.0f})
        append_f32(be, f, false);
    const PointCloud cloud = read_ply(be);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0] == Point3(1, 2, 3));
    REQUIRE(cloud.confidence.size() == 1);
    CHECK(cloud.confidence[0] == 0.75f);
    CHECK_FALSE(cloud.has_colors());
}

TEST_CASE("malformed ply files report their location")
{
    using U = ParseError::Unit;
    const std::string h = kPlyAsciiHeader;
    const auto header_with = [&](const std::string& from, const std::string& to) {
        std::string t = h;
        t.replace(t.find(from), from.size(), to);
        return bytes_of(t + "1 2 3\n4 5 6\n");
    };
    expect_parse_error([] { read_ply(Bytes{}); }, U::Line, 1);
    expect_parse_error([&] { read_ply(header_with("ply\n", "plx\n")); }, U::Line, 1);
    expect_parse_error([&] { read_ply(header_with("ascii 1.0", "ascii 2.0")); }, U::Line, 2);
    expect_parse_error([&] { read_ply(header_with("ascii", "utf8")); }, U::Line, 2);
    expect_parse_error([&] { read_ply(header_with("vertex 2", "vertex -1")); }, U::Line, 3);
    expect_parse_error([&] { read_ply(header_with("property float x", "property list uchar int x")); }, U::Line, 4);
    expect_parse_error([&] { read_ply(header_with("property float y", "property floaty y")); }, U::Line, 5);
    expect_parse_error([&] { read_ply(header_with("property float z", "property float x")); }, U::Line, 6);
    expect_parse_error([&] { read_ply(header_with("end_header", "begin_body")); }, U::Line, 7);
    expect_parse_error([&] { read_ply(header_with("property float x\n", "")); }, U::Line, 6);
    expect_parse_error([&] { read_ply(header_with("format ascii 1.0\n", "")); }, U::Line, 6);
    expect_parse_error([&] { read_ply(bytes_of("ply\nformat ascii 1.0\nelement vertex 2\n")); }, U::Line, 4);
    expect_parse_error([&] { read_ply(bytes_of(h + "1 2 3\n4 5\n")); }, U::Line, 9);
    expect_parse_error([&] { read_ply(bytes_of(h + "1 2 3\n4 5 6\n7\n")); }, U::Line, 10);
    expect_parse_error([&] { read_ply(bytes_of(h + "1 2 3\n4 x 6\n")); }, U::Line, 9);
    expect_parse_error([&] { read_ply(bytes_of(h + "1 2\n3 4 5 6\n")); }, U::Line, 9);

    std::string colored = h;
    colored.replace(colored.find("end_header"), 10,
                    "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header");
    expect_parse_error([&] { read_ply(bytes_of(colored + "1 2 3 0 0 0\n4 5 6 256 0 0\n")); }, U::Line, 12);

    const std::size_t body = kPlyBinaryHeader.size();
    expect_parse_error([&] { read_ply(with_zero_bytes(kPlyBinaryHeader, 20)); }, U::Byte, body);
    expect_parse_error([&] { read_ply(with_zero_bytes(kPlyBinaryHeader, 25)); }, U::Byte, body + 24);
    expect_parse_error(
        [&] { read_ply(with_floats(kPlyBinaryHeader, {1, 2, 3, 4, std::numeric_limits<float>::quiet_NaN(), 6})); },
        U::Byte, body + 12);
}

TEST_CASE("probability volume container round trip")
{
    std::mt19937_64 rng(65);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (bool per_pixel : {false, true}) {
        ProbabilityVolume vol;
        for (int d = 0; d < 4; ++d) {
            Grid p(3, 5);
            for (Eigen::Index i = 0; i < p.size(); ++i)
                p.data()[i] = u(rng);
            vol.probs.push_back(p);
            if (per_pixel)
                vol.pixel_hypotheses.push_back(Grid::Constant(3, 5, 425.0 + 10.0 * d) + Grid::Constant(3, 5, 0.5f));
            else
                vol.shared_hypotheses.push_back(425.0 + 2.5 * d);
        }
        const Bytes bytes = write_volume(vol);
        CHECK(bytes.size() == 24 + 4 * ((per_pixel ? 60 : 4) + 60));
        CHECK(std::memcmp(bytes.data(), "GCPV", 4) == 0);
        const ProbabilityVolume back = read_volume(bytes);
        REQUIRE(back.depth_count() == 4);
        CHECK(back.per_pixel() == per_pixel);
        for (std::size_t d = 0; d < 4; ++d) {
            CHECK((back.probs[d] == vol.probs[d]).all());
            if (per_pixel)
                CHECK((back.pixel_hypotheses[d] == vol.pixel_hypotheses[d]).all());
            else
                CHECK(back.shared_hypotheses[d] == vol.shared_hypotheses[d]);
        }
        CHECK(write_volume(back) == bytes);
    }
}

TEST_CASE("malformed probability volumes report byte offsets")
{
    using U = ParseError::Unit;
    ProbabilityVolume vol;
    vol.shared_hypotheses = {425.0, 430.0};
    vol.probs = {Grid::Constant(1, 2, 0.5), Grid::Constant(1, 2, 0.5)};
    const Bytes good = write_volume(vol);
    const auto patched = [&](std::size_t at, std::uint8_t value) {
        Bytes b = good;
        b[at] = value;
        return b;
    };
    expect_parse_error([&] { read_volume(patched(0, 'X')); }, U::Byte, 0);
    expect_parse_error([&] { read_volume(patched(4, 2)); }, U::Byte, 4);
    expect_parse_error([&] { read_volume(patched(8, 1)); }, U::Byte, 8);
    expect_parse_error([&] { read_volume(patched(20, 7)); }, U::Byte, 20);
    Bytes shortened(good.begin(), good.end() - 1);
    expect_parse_error([&] { read_volume(shortened); }, U::Byte, 24);
    Bytes longer = good;
    longer.push_back(0);
    expect_parse_error([&] { read_volume(longer); }, U::Byte, good.size());
    Bytes unsorted = good;
    std::memcpy(unsorted.data() + 28, unsorted.data() + 24, 4);
    expect_parse_error([&] { read_volume(unsorted); }, U::Byte, 24);
}

TEST_CASE("file helpers")
{
    testing::TempDir dir;
    const PfmImage img = pfm_from_grid(Grid::Constant(3, 2, 1.25));
    save_pfm(dir / "a.pfm", img);
    CHECK(load_pfm(dir / "a.pfm").data == img.data);
    CHECK_THROWS(load_pfm(dir / "missing.pfm"));
}
