#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pir {

/// Shortest round-trippable decimal form of a double (%.17g); CSV fields use
/// this so reruns with the same seed are bytewise identical.
std::string format_full(double v);

/// FNV-1a 64-bit hash; used to stamp outputs with the configuration they
/// came from.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

/// Minimal CSV assembly: fixed header, one row per call, comma separator.
/// Fields containing commas are not expected and are rejected.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header);
  void add_row(const std::vector<std::string>& fields);
  const std::string& str() const { return body_; }

 private:
  std::size_t n_cols_;
  std::string body_;
};

/// Writes content to path, creating parent directories.
void write_file(const std::string& path, const std::string& content);

}  // namespace pir
