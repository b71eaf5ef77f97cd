#pragma once

#include <cstddef>
#include <optional>

#include "harmonic/lattice.hpp"

namespace harmonic {

enum class SolverMethod { Jacobi, GaussSeidel, SOR, Direct };

const char* to_string(SolverMethod m);
SolverMethod parse_solver_method(const std::string& name);

struct SolverConfig {
    SolverMethod method = SolverMethod::Jacobi;
    /// Relaxation factor, used by SOR only; must lie in (0, 2).
    double omega = 1.5;
    /// Sup-norm tolerance on both the successive update and the residual.
    double tolerance = 1e-10;
    std::size_t max_iterations = 1'000'000;
    /// Worker threads for Jacobi sweeps. Results do not depend on it.
    int threads = 1;
    /// Interior unknown cap for the direct solver.
    std::size_t direct_max_unknowns = 200'000;

    void validate() const;
};

struct SolveReport {
    std::size_t iterations = 0;
    double final_residual_sup = 0.0;
    double final_update_sup = 0.0;
    bool converged = false;
    std::optional<double> contraction_estimate;
};

/// Thrown when an iterative solve hits max_iterations. Carries the last
/// iterate and its report so callers can still emit diagnostics.
class NotConvergedError : public Error {
public:
    NotConvergedError(ScalarField partial, SolveReport report);

    const ScalarField& partial() const { return partial_; }
    const SolveReport& report() const { return report_; }

private:
    ScalarField partial_;
    SolveReport report_;
};

struct Solution {
    ScalarField field;
    SolveReport report;
};

/// One averaging sweep: interior cells take their stencil average, boundary
/// cells are copied. Bit-identical for any thread count.
ScalarField apply_T(const ScalarField& field, int threads = 1);

/// Fixed-point iteration from the zero interior guess (or `warm_start`'s
/// interior). Throws NotConvergedError or Error(EmptyInterior).
Solution solve_iterative(const BoundaryValues& boundary, const SolverConfig& config,
                         const ScalarField* warm_start = nullptr);

/// Exact sparse solve of the mean-value system over the interior.
ScalarField solve_direct(const BoundaryValues& boundary,
                         std::size_t max_unknowns = 200'000);

/// Dispatches on config.method; the direct path reports zero iterations.
Solution solve(const BoundaryValues& boundary, const SolverConfig& config);

/// Median ratio of consecutive Jacobi update sup-norms over the final 10 of
/// `iterations` sweeps. Returns 0 when an update vanishes exactly before
/// enough ratios are available (finite-step convergence).
double estimate_contraction(const BoundaryValues& boundary, std::size_t iterations);

} // namespace harmonic
