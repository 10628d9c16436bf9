#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace melseg {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temporary file and rename, so readers never observe a
// partially written document.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// printf "%.*g" with the given number of significant digits.
std::string format_significant(double value, int digits);

}  // namespace melseg
