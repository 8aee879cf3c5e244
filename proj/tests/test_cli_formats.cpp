#include <doctest.h>

#include <sstream>

#include "way/csv.hpp"
#include "way/scheme.hpp"

using namespace way;

TEST_CASE("csv formatting") {
    CHECK(CsvReport::format(1.0) == "1");
    CHECK(CsvReport::format(0.2) == "0.2");
    CHECK(CsvReport::format(1.0 / 3.0) == "0.333333333333");
    CHECK(CsvReport::format(std::nan("")) == "NaN");
    CHECK(CsvReport::format(1.23456789012345e-7) == "1.23456789012e-07");
}

TEST_CASE("csv deterministic output has no timestamp and LF endings") {
    CsvReport r({"a", "b"}, 42, /*deterministic=*/true);
    r.row({1.0, 2.0});
    r.footer("done");
    std::ostringstream out;
    r.write(out);
    const std::string text = out.str();
    CHECK(text.find("generated") == std::string::npos);
    CHECK(text.find("seed 42") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.find("a,b\n1,2\n") != std::string::npos);
    CHECK(text.find("# done\n") != std::string::npos);

    // identical content twice
    CsvReport r2({"a", "b"}, 42, true);
    r2.row({1.0, 2.0});
    r2.footer("done");
    std::ostringstream out2;
    r2.write(out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("csv rejects column mismatches") {
    CsvReport r({"a", "b"}, 1, true);
    CHECK_THROWS(r.row({1.0}));
}

TEST_CASE("cnot audit fixture values") {
    // The fixture the CLI audit consumes: write, re-read, and check the
    // headline numbers the audit reports.
    const MeasurementScheme s = make_cnot_scheme();
    const Operator L1 = Operator::diag({1.0, -1.0});
    const Operator L2 = Operator::zero(2);
    std::ostringstream buf;
    write_scheme_file(buf, s, &L1, &L2);
    std::istringstream in(buf.str());
    const SchemeFile file = read_scheme_file(in);
    file.scheme.validate();
    const Povm povm = induced_povm(file.scheme);
    CHECK(povm.completeness_residual() <= 1e-10);
    CHECK(povm.min_effect_eigenvalue() >= -1e-10);
    ConservedPair pair{*file.L1, *file.L2};
    CHECK(conservation_residual(file.scheme, pair) <= 1e-12);
}
