#include "sigtrade/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "sigtrade/errors.hpp"

namespace sigtrade {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw DataError(ErrorKind::io, "short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec)
    throw DataError(ErrorKind::io,
                    "cannot move '" + tmp.string() + "' to '" + path.string() + "'");
}

}  // namespace sigtrade
