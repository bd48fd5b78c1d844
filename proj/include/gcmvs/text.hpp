#pragma once

// Shared helpers for the text formats.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcmvs::text {

/// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

struct Token
{
    std::string_view text;
    std::size_t line = 0;  // 1-based
};

/// Whitespace-separated tokens with their line numbers.
std::vector<Token> tokenize(std::string_view content);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace gcmvs::text
