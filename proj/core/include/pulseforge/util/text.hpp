#pragma once

#include <string>
#include <vector>

namespace pulseforge::util {

// Locale-independent numeric formatting (shortest round-trip form).
std::string format_double(double v);
// Fixed scientific form with the given precision, e.g. "1.234568e-12".
std::string format_scientific(double v, int precision = 9);

std::string join_csv(const std::vector<std::string>& fields);

// Reads a whole file; throws IoError.
std::string read_file(const std::string& path);
// Writes (truncating); throws IoError. Creates parent directories first.
void write_file(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

}  // namespace pulseforge::util
