#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace npmr::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; a trailing '\r' is dropped.
std::vector<std::string> split_line(std::string_view line);

/// Quotes the field only if it contains a comma, quote, or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict parse of the whole string; false on trailing junk.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written file.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer);

} // namespace npmr::csv
