#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace esg::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Comma separated, no quoting. Blank lines and `#` comment lines are skipped, cells are trimmed.
Table parse(std::string_view text);
Table read(const std::filesystem::path& path);

/// Parses a decimal number with '.' separator; nullopt on anything else.
std::optional<double> parse_double(std::string_view cell);

/// Shortest representation that round-trips.
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace esg::csv
