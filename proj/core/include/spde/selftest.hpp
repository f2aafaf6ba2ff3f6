#pragma once

#include "spde/heat_operator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spde {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst observed deviation against the tolerance, or the failure reason.
    std::string detail;
};

struct SelftestReport {
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool passed() const noexcept;
};

/// exp(t * a) by scaling and squaring of a truncated Taylor series.
/// Independent of the spectral path; used as its oracle.
DenseMatrix dense_expm(const DenseMatrix& a, double t);

/// Operator invariants on small random instances: semigroup law, kernel
/// positivity, contraction, spectral vs dense exponential, implicit-solve
/// residual, Brownian coarsening, N = 2 scalar oracles for all four steps,
/// f/g consistency, zero fixed point and zero-noise reductions.
SelftestReport run_selftest(std::uint64_t seed = 12345);

}  // namespace spde
