#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace way {

// Deterministic CSV writer: '#' comment header (tool version, seed, hbar,
// tolerances), one column-header line, rows at 12 significant digits,
// LF endings, '.' decimal. Byte-identical output for fixed config + seed.
class CsvReport {
  public:
    CsvReport(std::vector<std::string> columns, std::uint64_t seed,
              bool deterministic);

    void comment(const std::string& line);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);  // pre-formatted cells
    void footer(const std::string& line);                    // comment at the end

    void write(std::ostream& out) const;
    void write_file(const std::string& path) const;

    static std::string format(double v);  // 12 significant digits, NaN -> "NaN"

    std::size_t row_count() const { return rows_.size(); }

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::string> footers_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace way
