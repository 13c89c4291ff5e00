#pragma once

// Output files: every CSV starts with two comment lines,
//
//   # sgns <version>
//   # seed=<seed>
//
// followed by a column-name row, a units row and the data. Numbers are
// written with 17 significant digits so that reruns compare byte for byte.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace sgns {

inline constexpr const char* kVersion = "0.1.0";

std::string format_number(double v);

void write_preamble(std::ostream& out, std::uint64_t seed);

using CsvCell = std::variant<double, std::int64_t, std::string>;

/// Writes the column and unit rows on construction, then one row per call.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& columns, const std::vector<std::string>& units);

  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& out_;
  std::size_t width_;
};

/// Creates the parent directory, opens `path` in binary mode and lets `body`
/// fill it. Throws std::runtime_error if the file cannot be written.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

/// Preamble plus body.
void write_csv_file(const std::filesystem::path& path, std::uint64_t seed,
                    const std::function<void(std::ostream&)>& body);

/// Drops the leading "# sgns <version>" line; used to compare reruns across
/// versions.
std::string strip_version_line(const std::string& text);

}  // namespace sgns
