#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace covspec {

// Locale-independent shortest-exact formatting (17 significant digits).
std::string format_double(double v);

// FNV-1a 64-bit over raw bytes; used to stamp outputs with the config hash.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t v);

// CSV with a leading comment line and a header row. All writes go through
// format_double so files are byte-stable.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& comment,
            const std::vector<std::string>& header);
  ~CsvWriter();

  void row(const std::vector<std::string>& cells);
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }

 private:
  std::string buffer_;
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace covspec
