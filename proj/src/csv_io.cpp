#include "sgns/csv_io.hpp"

#include "sgns/errors.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sgns {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_preamble(std::ostream& out, std::uint64_t seed) {
  out << "# sgns " << kVersion << "\n# seed=" << seed << '\n';
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& columns,
                     const std::vector<std::string>& units)
    : out_(out), width_(columns.size()) {
  if (units.size() != columns.size()) throw InvalidArgument("CsvWriter: one unit per column required");
  for (const auto* line : {&columns, &units}) {
    for (std::size_t i = 0; i < line->size(); ++i) out_ << (i ? "," : "") << (*line)[i];
    out_ << '\n';
  }
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != width_) throw InvalidArgument("CsvWriter: row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_number(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_csv_file(const std::filesystem::path& path, std::uint64_t seed,
                    const std::function<void(std::ostream&)>& body) {
  write_file(path, [&](std::ostream& out) {
    write_preamble(out, seed);
    body(out);
  });
}

std::string strip_version_line(const std::string& text) {
  if (text.rfind("# sgns ", 0) != 0) return text;
  const auto eol = text.find('\n');
  return eol == std::string::npos ? std::string() : text.substr(eol + 1);
}

}  // namespace sgns
