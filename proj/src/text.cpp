#include "gcmvs/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace gcmvs::text {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view token)
{
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty())
        return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view token)
{
    long long v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty())
        return std::nullopt;
    return v;
}

std::vector<Token> tokenize(std::string_view content)
{
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < content.size()) {
        const char ch = content[i];
        if (ch == '\n') {
            ++line;
            ++i;
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v') {
            ++i;
        } else {
            const std::size_t start = i;
            while (i < content.size() && !std::isspace(static_cast<unsigned char>(content[i])))
                ++i;
            out.push_back({content.substr(start, i - start), line});
        }
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

} // namespace gcmvs::text
