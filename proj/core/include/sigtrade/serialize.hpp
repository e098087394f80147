#pragma once

#include <filesystem>
#include <string>

namespace sigtrade {

// Canonical number formatting for CSV output: %.12g. Shared by every writer so
// repeated runs produce byte-identical files.
std::string format_double(double v);

// Writes content to a temporary file in the target directory and renames it
// into place, so a crash never leaves a truncated artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sigtrade
