#include "gcmvs/io.hpp"

#include "gcmvs/text.hpp"

#include <cmath>

namespace gcmvs {

CameraD parse_cam(const std::string& content, std::vector<std::string>* warnings)
{
    const auto tokens = text::tokenize(content);
    std::size_t pos = 0;
    const auto fail = [&](const std::string& what) -> ParseError {
        const std::size_t line = pos < tokens.size() ? tokens[pos].line
                                                     : (tokens.empty() ? 1 : tokens.back().line);
        return ParseError("cam file: " + what, line, ParseError::Unit::Line);
    };
    const auto keyword = [&](const char* word) {
        if (pos >= tokens.size())
            throw fail(std::string("missing section '") + word + "'");
        if (tokens[pos].text != word)
            throw fail(std::string("expected '") + word + "', got '" + std::string(tokens[pos].text) + "'");
        ++pos;
    };
    const auto number = [&](const char* what) {
        if (pos >= tokens.size())
            throw fail(std::string("unexpected end of file in ") + what);
        const auto v = text::parse_double(tokens[pos].text);
        if (!v || !std::isfinite(*v))
            throw fail(std::string("invalid number '") + std::string(tokens[pos].text) + "' in " + what);
        ++pos;
        return *v;
    };

    CameraD cam;
    keyword("extrinsic");
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            cam.E(r, c) = number("extrinsic");
    keyword("intrinsic");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            cam.K(r, c) = number("intrinsic");

    // Depth line: depth_min depth_interval [num_depth [depth_max]].
    if (pos >= tokens.size())
        throw fail("missing depth range line");
    const std::size_t depth_line = tokens[pos].line;
    std::size_t depth_values = 0;
    for (std::size_t i = pos; i < tokens.size() && tokens[i].line == depth_line; ++i)
        ++depth_values;
    if (depth_values < 2 || depth_values > 4)
        throw fail("depth line needs 2 to 4 values, found " + std::to_string(depth_values));
    cam.depth_min = number("depth line");
    cam.depth_interval = number("depth line");
    for (std::size_t i = 2; i < depth_values; ++i)
        number("depth line");
    if (pos != tokens.size())
        throw fail("trailing content after depth line");
    if (!(cam.depth_min > 0.0) || !(cam.depth_interval > 0.0)) {
        pos = pos - depth_values;
        throw fail("depth_min and depth_interval must be positive");
    }

    if (warnings)
        for (auto& issue : camera_issues(cam, 1e-3))
            warnings->push_back(std::move(issue));
    return cam;
}

std::string format_cam(const CameraD& cam)
{
    std::string out = "extrinsic\n";
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c)
            out += (c ? " " : "") + text::format_double(cam.E(r, c));
        out += "\n";
    }
    out += "\nintrinsic\n";
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c)
            out += (c ? " " : "") + text::format_double(cam.K(r, c));
        out += "\n";
    }
    out += "\n" + text::format_double(cam.depth_min) + " " + text::format_double(cam.depth_interval) + "\n";
    return out;
}

CameraD load_cam(const std::string& path, std::vector<std::string>* warnings)
{
    return parse_cam(text::read_file(path), warnings);
}

void save_cam(const std::string& path, const CameraD& cam)
{
    text::write_file(path, format_cam(cam));
}

} // namespace gcmvs
