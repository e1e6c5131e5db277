#pragma once

#include <complex>
#include <filesystem>
#include <string>

namespace subres::io {

// 17 significant digits; round-trips every double exactly.
std::string fmt(double value);

// Writes through a sibling temp file and renames, so readers never observe a
// partially written file.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace subres::io
