#include "gcmvs/io.hpp"

#include "byte_io.hpp"
#include "gcmvs/text.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace gcmvs {

namespace {

enum class Scalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<Scalar> scalar_type(std::string_view name)
{
    if (name == "char" || name == "int8") return Scalar::Int8;
    if (name == "uchar" || name == "uint8") return Scalar::UInt8;
    if (name == "short" || name == "int16") return Scalar::Int16;
    if (name == "ushort" || name == "uint16") return Scalar::UInt16;
    if (name == "int" || name == "int32") return Scalar::Int32;
    if (name == "uint" || name == "uint32") return Scalar::UInt32;
    if (name == "float" || name == "float32") return Scalar::Float32;
    if (name == "double" || name == "float64") return Scalar::Float64;
    return std::nullopt;
}

std::size_t scalar_size(Scalar s)
{
    switch (s) {
    case Scalar::Int8: case Scalar::UInt8: return 1;
    case Scalar::Int16: case Scalar::UInt16: return 2;
    case Scalar::Int32: case Scalar::UInt32: case Scalar::Float32: return 4;
    case Scalar::Float64: return 8;
    }
    return 0;
}

double read_binary(detail::ByteCursor& cur, Scalar s, bool little)
{
    switch (s) {
    case Scalar::Int8: return cur.read<std::int8_t>(little);
    case Scalar::UInt8: return cur.read<std::uint8_t>(little);
    case Scalar::Int16: return cur.read<std::int16_t>(little);
    case Scalar::UInt16: return cur.read<std::uint16_t>(little);
    case Scalar::Int32: return cur.read<std::int32_t>(little);
    case Scalar::UInt32: return cur.read<std::uint32_t>(little);
    case Scalar::Float32: return cur.read<float>(little);
    case Scalar::Float64: return cur.read<double>(little);
    }
    return 0.0;
}

struct Property
{
    std::string name;
    Scalar type;
};

enum class Encoding { Ascii, BinaryLE, BinaryBE };

struct Header
{
    Encoding encoding = Encoding::Ascii;
    std::size_t vertex_count = 0;
    std::vector<Property> props;
    std::size_t body_offset = 0;
    std::size_t lines = 0;
};

Header parse_header(std::span<const std::uint8_t> bytes)
{
    Header h;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool have_format = false, have_vertex = false, in_vertex = false;
    const auto fail = [&](const std::string& what) -> ParseError {
        return ParseError("ply header: " + what, line_no, ParseError::Unit::Line);
    };
    while (true) {
        if (pos >= bytes.size())
            throw ParseError("ply header: missing end_header", line_no + 1, ParseError::Unit::Line);
        std::size_t end = pos;
        while (end < bytes.size() && bytes[end] != '\n')
            ++end;
        if (end >= bytes.size())
            throw ParseError("ply header: missing end_header", line_no + 1, ParseError::Unit::Line);
        ++line_no;
        std::string_view line(reinterpret_cast<const char*>(bytes.data()) + pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos = end + 1;
        const auto toks = text::tokenize(line);
        if (line_no == 1) {
            if (toks.size() != 1 || toks[0].text != "ply")
                throw fail("bad magic, expected 'ply'");
            continue;
        }
        if (toks.empty())
            continue;
        const auto key = toks[0].text;
        if (key == "comment" || key == "obj_info")
            continue;
        if (key == "format") {
            if (toks.size() != 3 || toks[2].text != "1.0")
                throw fail("malformed format line");
            if (toks[1].text == "ascii") h.encoding = Encoding::Ascii;
            else if (toks[1].text == "binary_little_endian") h.encoding = Encoding::BinaryLE;
            else if (toks[1].text == "binary_big_endian") h.encoding = Encoding::BinaryBE;
            else throw fail("unknown format '" + std::string(toks[1].text) + "'");
            have_format = true;
        } else if (key == "element") {
            if (toks.size() != 3)
                throw fail("malformed element line");
            const auto count = text::parse_int(toks[2].text);
            if (!count || *count < 0)
                throw fail("invalid element count '" + std::string(toks[2].text) + "'");
            if (toks[1].text == "vertex") {
                if (have_vertex)
                    throw fail("duplicate vertex element");
                have_vertex = in_vertex = true;
                h.vertex_count = std::size_t(*count);
            } else {
                if (*count != 0)
                    throw fail("unsupported non-empty element '" + std::string(toks[1].text) + "'");
                in_vertex = false;
            }
        } else if (key == "property") {
            if (toks.size() >= 2 && toks[1].text == "list") {
                if (in_vertex)
                    throw fail("list properties are not supported on vertices");
                continue;
            }
            if (toks.size() != 3)
                throw fail("malformed property line");
            if (!in_vertex)
                continue;
            const auto type = scalar_type(toks[1].text);
            if (!type)
                throw fail("unknown property type '" + std::string(toks[1].text) + "'");
            for (const auto& p : h.props)
                if (p.name == toks[2].text)
                    throw fail("duplicate property '" + p.name + "'");
            h.props.push_back({std::string(toks[2].text), *type});
        } else if (key == "end_header") {
            if (toks.size() != 1)
                throw fail("malformed end_header");
            break;
        } else {
            throw fail("unknown header keyword '" + std::string(key) + "'");
        }
    }
    if (!have_format)
        throw fail("missing format line");
    if (!have_vertex)
        throw fail("missing vertex element");
    h.body_offset = pos;
    h.lines = line_no;
    return h;
}

int find_prop(const std::vector<Property>& props, std::string_view name)
{
    for (std::size_t i = 0; i < props.size(); ++i)
        if (props[i].name == name)
            return int(i);
    return -1;
}

} // namespace

Bytes write_ply(const PointCloud& cloud, PlyFormat format)
{
    const bool colored = cloud.has_colors();
    if (colored && cloud.colors.size() != cloud.points.size())
        throw std::invalid_argument("color count differs from point count");
    std::string header = "ply\nformat ";
    header += format == PlyFormat::Ascii ? "ascii" : "binary_little_endian";
    header += " 1.0\nelement vertex " + std::to_string(cloud.size()) +
              "\nproperty float x\nproperty float y\nproperty float z\n";
    if (colored)
        header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    header += "end_header\n";

    Bytes out;
    detail::append_text(out, header);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.points[i];
        if (format == PlyFormat::Ascii) {
            std::string line = text::format_double(double(float(p.x()))) + " " +
                               text::format_double(double(float(p.y()))) + " " +
                               text::format_double(double(float(p.z())));
            if (colored)
                for (auto ch : cloud.colors[i])
                    line += " " + std::to_string(int(ch));
            detail::append_text(out, line + "\n");
        } else {
            for (int k = 0; k < 3; ++k)
                detail::append_le(out, static_cast<float>(p[k]));
            if (colored)
                out.insert(out.end(), cloud.colors[i].begin(), cloud.colors[i].end());
        }
    }
    return out;
}

PointCloud read_ply(std::span<const std::uint8_t> bytes)
{
    const Header h = parse_header(bytes);
    const int ix = find_prop(h.props, "x"), iy = find_prop(h.props, "y"), iz = find_prop(h.props, "z");
    if (ix < 0 || iy < 0 || iz < 0)
        throw ParseError("ply header: vertex element lacks x, y or z", h.lines, ParseError::Unit::Line);
    const std::array<int, 3> irgb{find_prop(h.props, "red"), find_prop(h.props, "green"), find_prop(h.props, "blue")};
    const bool colored = irgb[0] >= 0 && irgb[1] >= 0 && irgb[2] >= 0;
    if ((irgb[0] >= 0 || irgb[1] >= 0 || irgb[2] >= 0) && !colored)
        throw ParseError("ply header: incomplete color properties", h.lines, ParseError::Unit::Line);
    const int iconf = find_prop(h.props, "confidence");

    PointCloud cloud;
    cloud.points.reserve(h.vertex_count);
    std::vector<double> values(h.props.size());
    const auto commit = [&](std::size_t where, ParseError::Unit unit) {
        const Point3 p(values[std::size_t(ix)], values[std::size_t(iy)], values[std::size_t(iz)]);
        if (!p.allFinite())
            throw ParseError("ply: non-finite vertex coordinate", where, unit);
        cloud.points.push_back(p);
        if (colored) {
            Rgb c{};
            for (int k = 0; k < 3; ++k) {
                const double v = values[std::size_t(irgb[std::size_t(k)])];
                if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v))
                    throw ParseError("ply: color component out of range", where, unit);
                c[std::size_t(k)] = static_cast<std::uint8_t>(v);
            }
            cloud.colors.push_back(c);
        }
        if (iconf >= 0)
            cloud.confidence.push_back(static_cast<float>(values[std::size_t(iconf)]));
    };

    if (h.encoding == Encoding::Ascii) {
        const std::string_view body(reinterpret_cast<const char*>(bytes.data()) + h.body_offset,
                                    bytes.size() - h.body_offset);
        const auto toks = text::tokenize(body);
        const std::size_t expected = h.vertex_count * h.props.size();
        if (toks.size() < expected)
            throw ParseError("ply: truncated ascii body", h.lines + (toks.empty() ? 1 : toks.back().line),
                             ParseError::Unit::Line);
        if (toks.size() > expected)
            throw ParseError("ply: trailing content after last vertex", h.lines + toks[expected].line,
                             ParseError::Unit::Line);
        for (std::size_t v = 0; v < h.vertex_count; ++v) {
            const std::size_t line = h.lines + toks[v * h.props.size()].line;
            for (std::size_t k = 0; k < h.props.size(); ++k) {
                const auto& tok = toks[v * h.props.size() + k];
                if (h.lines + tok.line != line)
                    throw ParseError("ply: vertex spans multiple lines", h.lines + tok.line, ParseError::Unit::Line);
                const auto parsed = text::parse_double(tok.text);
                if (!parsed)
                    throw ParseError("ply: invalid number '" + std::string(tok.text) + "'", line,
                                     ParseError::Unit::Line);
                values[k] = *parsed;
            }
            commit(line, ParseError::Unit::Line);
        }
    } else {
        const bool little = h.encoding == Encoding::BinaryLE;
        detail::ByteCursor cur(bytes, "ply");
        cur.skip(h.body_offset);
        std::size_t stride = 0;
        for (const auto& p : h.props)
            stride += scalar_size(p.type);
        if (h.vertex_count != 0 && cur.remaining() / h.vertex_count < stride)
            cur.fail("truncated payload: expected " + std::to_string(stride * h.vertex_count) + " bytes");
        if (cur.remaining() > stride * h.vertex_count)
            cur.fail_at("trailing bytes after last vertex", h.body_offset + stride * h.vertex_count);
        for (std::size_t v = 0; v < h.vertex_count; ++v) {
            const std::size_t at = cur.offset();
            for (std::size_t k = 0; k < h.props.size(); ++k)
                values[k] = read_binary(cur, h.props[k].type, little);
            commit(at, ParseError::Unit::Byte);
        }
    }
    return cloud;
}

PointCloud load_ply(const std::string& path)
{
    return read_ply(read_bytes(path));
}

void save_ply(const std::string& path, const PointCloud& cloud, PlyFormat format)
{
    write_bytes(path, write_ply(cloud, format));
}

} // namespace gcmvs
