#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spectriple {

std::string read_file(const std::filesystem::path& path);

// Splits CSV text into trimmed fields.  Blank lines and lines starting with
// `#` are skipped; the first remaining row is dropped when has_header is set.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, bool has_header);

// Strict full-field parse; throws Error(parse) naming `where` on failure.
double parse_real(const std::string& field, const std::string& where);
long long parse_integer(const std::string& field, const std::string& where);

// 15 significant digits; "inf" for +infinity.
std::string format_real(double value);

}  // namespace spectriple
