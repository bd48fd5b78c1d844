#include "gcmvs/io.hpp"

#include "byte_io.hpp"
#include "gcmvs/text.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace gcmvs {

namespace {

constexpr long long kMaxDimension = 1 << 20;

bool is_space(std::uint8_t b) { return std::isspace(static_cast<unsigned char>(b)) != 0; }

std::string next_token(detail::ByteCursor& cur, const char* what, std::size_t& start)
{
    while (!cur.at_end() && is_space(cur.peek()))
        cur.skip(1);
    start = cur.offset();
    if (cur.at_end())
        cur.fail(std::string("missing ") + what);
    std::string tok;
    while (!cur.at_end() && !is_space(cur.peek())) {
        tok.push_back(static_cast<char>(cur.peek()));
        cur.skip(1);
        if (tok.size() > 64)
            cur.fail(std::string("oversized ") + what);
    }
    return tok;
}

} // namespace

PfmImage read_pfm(std::span<const std::uint8_t> bytes)
{
    detail::ByteCursor cur(bytes, "pfm");
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != 'f' && bytes[1] != 'F'))
        cur.fail("bad magic, expected 'Pf' or 'PF'");
    PfmImage img;
    img.channels = bytes[1] == 'f' ? 1 : 3;
    cur.skip(2);
    if (cur.at_end() || !is_space(cur.peek()))
        cur.fail("bad magic, expected whitespace after 'Pf'/'PF'");

    const auto dim = [&](const char* what) {
        std::size_t at = 0;
        const std::string tok = next_token(cur, what, at);
        const auto v = text::parse_int(tok);
        if (!v || *v <= 0 || *v > kMaxDimension)
            cur.fail_at(std::string("invalid ") + what + " '" + tok + "'", at);
        return static_cast<int>(*v);
    };
    img.width = dim("width");
    img.height = dim("height");

    std::size_t scale_at = 0;
    const std::string scale_tok = next_token(cur, "scale", scale_at);
    const auto scale = text::parse_double(scale_tok);
    if (!scale || !std::isfinite(*scale))
        cur.fail_at("invalid scale '" + scale_tok + "'", scale_at);
    if (*scale == 0.0)
        cur.fail_at("zero scale", scale_at);
    img.scale = static_cast<float>(*scale);
    if (cur.at_end() || !is_space(cur.peek()))
        cur.fail("missing whitespace after scale");
    cur.skip(1);

    const std::size_t values = std::size_t(img.width) * std::size_t(img.height) * std::size_t(img.channels);
    const std::size_t expected = values * sizeof(float);
    if (cur.remaining() < expected)
        cur.fail("truncated payload: expected " + std::to_string(expected) + " bytes, found " +
                 std::to_string(cur.remaining()));
    if (cur.remaining() > expected)
        cur.fail_at("trailing bytes after payload", cur.offset() + expected);

    const bool little = *scale < 0.0;
    img.data.resize(values);
    const std::size_t row_values = std::size_t(img.width) * std::size_t(img.channels);
    for (int file_row = 0; file_row < img.height; ++file_row) {
        const int row = img.height - 1 - file_row;
        for (std::size_t i = 0; i < row_values; ++i)
            img.data[std::size_t(row) * row_values + i] = cur.read<float>(little);
    }
    return img;
}

Bytes write_pfm(const PfmImage& image)
{
    if (image.channels != 1 && image.channels != 3)
        throw std::invalid_argument("pfm supports 1 or 3 channels");
    if (image.width <= 0 || image.height <= 0)
        throw std::invalid_argument("pfm dimensions must be positive");
    if (image.data.size() != std::size_t(image.width) * std::size_t(image.height) * std::size_t(image.channels))
        throw std::invalid_argument("pfm data length does not match dimensions");
    if (!(image.scale != 0.0f) || !std::isfinite(image.scale))
        throw std::invalid_argument("pfm scale must be finite and non-zero");

    Bytes out;
    detail::append_text(out, std::string(image.channels == 1 ? "Pf" : "PF") + "\n" + std::to_string(image.width) +
                                 " " + std::to_string(image.height) + "\n" +
                                 text::format_double(-std::abs(double(image.scale))) + "\n");
    out.reserve(out.size() + image.data.size() * sizeof(float));
    const std::size_t row_values = std::size_t(image.width) * std::size_t(image.channels);
    for (int row = image.height - 1; row >= 0; --row)
        for (std::size_t i = 0; i < row_values; ++i)
            detail::append_le(out, image.data[std::size_t(row) * row_values + i]);
    return out;
}

PfmImage pfm_from_grid(const Grid& grid)
{
    PfmImage img;
    img.width = static_cast<int>(grid.cols());
    img.height = static_cast<int>(grid.rows());
    img.channels = 1;
    img.data.resize(std::size_t(grid.size()));
    for (Eigen::Index r = 0; r < grid.rows(); ++r)
        for (Eigen::Index c = 0; c < grid.cols(); ++c)
            img.at(int(r), int(c)) = static_cast<float>(grid(r, c));
    return img;
}

Grid grid_from_pfm(const PfmImage& image)
{
    if (image.channels != 1)
        throw std::invalid_argument("expected a single-channel pfm");
    Grid g(image.height, image.width);
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c)
            g(r, c) = image.at(r, c);
    return g;
}

DepthMap depth_from_pfm(const PfmImage& image)
{
    return DepthMap::from_values(grid_from_pfm(image));
}

PfmImage load_pfm(const std::string& path)
{
    return read_pfm(read_bytes(path));
}

void save_pfm(const std::string& path, const PfmImage& image)
{
    write_bytes(path, write_pfm(image));
}

Bytes read_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

} // namespace gcmvs
