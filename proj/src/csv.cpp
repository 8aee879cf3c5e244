#include "way/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "way/config.hpp"

namespace way {

CsvReport::CsvReport(std::vector<std::string> columns, std::uint64_t seed,
                     bool deterministic)
    : columns_(std::move(columns)) {
    comments_.push_back(std::string("# tool ") + kToolVersion);
    comments_.push_back("# seed " + std::to_string(seed));
    comments_.push_back("# hbar " + format(hbar()));
    {
        std::ostringstream t;
        t << "# tolerances unitary=" << format(tol().unitary)
          << " povm_complete=" << format(tol().povm_complete)
          << " wigner_residual=" << format(tol().wigner_residual)
          << " lattice=" << format(tol().lattice)
          << " slack=" << format(tol().slack);
        comments_.push_back(t.str());
    }
    if (!deterministic) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        comments_.push_back(std::string("# generated ") + buf);
    }
}

void CsvReport::comment(const std::string& line) {
    comments_.push_back("# " + line);
}

std::string CsvReport::format(double v) {
    if (std::isnan(v)) return "NaN";
    if (v == 0.0) return "0";  // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvReport::row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw std::runtime_error("CsvReport: column count mismatch");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format(v));
    rows_.push_back(std::move(cells));
}

void CsvReport::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_.size())
        throw std::runtime_error("CsvReport: column count mismatch");
    rows_.push_back(values);
}

void CsvReport::footer(const std::string& line) { footers_.push_back("# " + line); }

void CsvReport::write(std::ostream& out) const {
    for (const auto& c : comments_) out << c << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out << ",";
        out << columns_[i];
    }
    out << "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << ",";
            out << r[i];
        }
        out << "\n";
    }
    for (const auto& f : footers_) out << f << "\n";
}

void CsvReport::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);  // binary: LF endings everywhere
    if (!f) throw std::runtime_error("CsvReport: cannot open " + path);
    write(f);
}

}  // namespace way
