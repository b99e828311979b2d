#include "tailwave/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "tailwave/errors.hpp"

namespace tailwave {

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace tailwave
