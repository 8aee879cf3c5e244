// Writes the CNOT scheme fixture consumed by the audit end-to-end test.

#include <fstream>
#include <iostream>

#include "way/scheme.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: write_cnot_fixture <path>\n";
        return 2;
    }
    const way::MeasurementScheme s = way::make_cnot_scheme();
    const way::Operator L1 = way::Operator::diag({1.0, -1.0});
    const way::Operator L2 = way::Operator::zero(2);
    std::ofstream out(argv[1], std::ios::binary);
    if (!out) {
        std::cerr << "cannot open " << argv[1] << "\n";
        return 1;
    }
    way::write_scheme_file(out, s, &L1, &L2);
    return 0;
}
