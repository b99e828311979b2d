#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tailwave {

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

/// Write via a temporary file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Full-precision (17 significant digit) scientific formatting.
std::string format_double(double x);

/// Comma-separated table with a header row.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

}  // namespace tailwave
