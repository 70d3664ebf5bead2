#pragma once

#include "driftwave/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Randomized verification suites for the operator identities the solver is
// built on and for the exactness properties of the discrete calculus.  Each
// check line carries the algebraic identity it exercises as its anchor
// string, the worst residual observed, and the threshold it was held to.

namespace driftwave::verify {

struct CheckLine {
    std::string name;
    std::string anchor;  // the identity under test, written as a formula
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
    int cases = 0;
};

struct VerificationReport {
    std::vector<CheckLine> checks;
    int passed() const;
    int failed() const;
    bool all_passed() const { return failed() == 0; }
    double elapsed_seconds = 0.0;
};

// Identity suite over randomized dense operators (sizes 4..12, entries
// uniform on [-1,1], quasi-skew built as skew + eps * symmetric).
VerificationReport run_operator_identity_suite(std::uint64_t seed, int cases_per_identity,
                                               double eta0 = 0.5);

// Exactness and adjointness of the discrete calculus on the given grid and
// its refinement: d.d = 0, <dS,T> = <S,d*T>, Hodge isometry and double star,
// Cartan commutation, axial convergence order, constant-drift skewness.
VerificationReport run_calculus_suite(const dec::GridSpec& base, std::uint64_t seed);

void write_report_text(std::ostream& out, const VerificationReport& report);
void write_report_csv(std::ostream& out, const VerificationReport& report);

}  // namespace driftwave::verify
