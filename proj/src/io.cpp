#include "pir/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pir {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header) : n_cols_(header.size()) {
  add_row(header);
}

void CsvBuilder::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != n_cols_)
    throw std::invalid_argument("CsvBuilder: row width does not match header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find(',') != std::string::npos || fields[i].find('\n') != std::string::npos)
      throw std::invalid_argument("CsvBuilder: field contains separator");
    if (i) body_ += ',';
    body_ += fields[i];
  }
  body_ += '\n';
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("write_file: cannot open " + path);
  out << content;
}

}  // namespace pir
