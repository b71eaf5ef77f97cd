#include "harmonic/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace harmonic {

const char* to_string(SolverMethod m)
{
    switch (m) {
    case SolverMethod::Jacobi: return "jacobi";
    case SolverMethod::GaussSeidel: return "gauss-seidel";
    case SolverMethod::SOR: return "sor";
    case SolverMethod::Direct: return "direct";
    }
    return "unknown";
}

SolverMethod parse_solver_method(const std::string& name)
{
    if (name == "jacobi") return SolverMethod::Jacobi;
    if (name == "gauss-seidel") return SolverMethod::GaussSeidel;
    if (name == "sor") return SolverMethod::SOR;
    if (name == "direct") return SolverMethod::Direct;
    throw Error(ErrorCode::InvalidArgument, "unknown solver method '" + name + "'");
}

void SolverConfig::validate() const
{
    if (method == SolverMethod::SOR && !(omega > 0.0 && omega < 2.0)) {
        throw Error(ErrorCode::InvalidArgument, "SOR omega must lie in (0, 2)");
    }
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    if (max_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_iterations must be at least 1");
    }
    if (threads < 1) {
        throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
    }
}

NotConvergedError::NotConvergedError(ScalarField partial, SolveReport report)
    : Error(ErrorCode::NotConverged,
            "solver did not converge after " + std::to_string(report.iterations)
                + " iterations (update " + std::to_string(report.final_update_sup) + ", residual "
                + std::to_string(report.final_residual_sup) + ")"),
      partial_(std::move(partial)),
      report_(report)
{
}

namespace {

inline double average(const Region& region, const double* v, std::size_t i)
{
    const double w = region.stencil().uniform_weight();
    double sum = 0.0;
    for (auto n : region.neighbors(i)) {
        sum += v[n];
    }
    return w * sum;
}

/// Jacobi sweep from `src` into `dst`; returns the update sup-norm.
double jacobi_sweep(const Region& region, const double* src, double* dst, int threads)
{
    const auto n = static_cast<std::ptrdiff_t>(region.interior_size());
    double upd = 0.0;
#pragma omp parallel for num_threads(threads) schedule(static) reduction(max : upd) if (threads > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double a = average(region, src, static_cast<std::size_t>(i));
        upd = std::max(upd, std::abs(a - src[i]));
        dst[i] = a;
    }
    return upd;
}

/// In-place lexicographic sweep; omega == 1 is Gauss-Seidel.
double relaxation_sweep(const Region& region, double* v, double omega)
{
    const auto n = region.interior_size();
    double upd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = average(region, v, i);
        double next = omega == 1.0 ? a : (1.0 - omega) * v[i] + omega * a;
        upd = std::max(upd, std::abs(next - v[i]));
        v[i] = next;
    }
    return upd;
}

double residual_sup(const Region& region, const double* v)
{
    double sup = 0.0;
    for (std::size_t i = 0; i < region.interior_size(); ++i) {
        sup = std::max(sup, std::abs(v[i] - average(region, v, i)));
    }
    return sup;
}

double median(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    auto n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

constexpr std::size_t kRatioWindow = 10;

/// Median consecutive ratio over the last kRatioWindow updates of `norms`.
/// Returns 0 if a zero update appears in the window, nullopt if too short.
std::optional<double> median_ratio(const std::deque<double>& norms)
{
    if (!norms.empty() && norms.back() == 0.0) {
        return 0.0;
    }
    if (norms.size() < kRatioWindow + 1) {
        return std::nullopt;
    }
    std::vector<double> ratios;
    for (auto k = norms.size() - kRatioWindow; k < norms.size(); ++k) {
        if (norms[k - 1] == 0.0) {
            return 0.0;
        }
        ratios.push_back(norms[k] / norms[k - 1]);
    }
    return median(std::move(ratios));
}

void require_interior(const Region& region)
{
    if (region.interior_size() == 0) {
        throw Error(ErrorCode::EmptyInterior, "region has an empty interior");
    }
}

} // namespace

ScalarField apply_T(const ScalarField& field, int threads)
{
    const auto& region = field.region_ref();
    std::vector<double> out(field.values().begin(), field.values().end());
    jacobi_sweep(region, field.values().data(), out.data(), std::max(threads, 1));
    return ScalarField(field.region(), std::move(out));
}

Solution solve_iterative(const BoundaryValues& boundary, const SolverConfig& config,
                         const ScalarField* warm_start)
{
    config.validate();
    if (config.method == SolverMethod::Direct) {
        throw Error(ErrorCode::InvalidArgument, "solve_iterative: direct is not an iterative method");
    }
    const auto& region_ptr = boundary.region();
    const Region& region = *region_ptr;
    require_interior(region);

    auto start = ScalarField::from_boundary(boundary, 0.0);
    std::vector<double> cur(start.values().begin(), start.values().end());
    if (warm_start) {
        if (!(*warm_start->region() == region)) {
            throw Error(ErrorCode::InvalidArgument, "warm start is defined on a different region");
        }
        std::copy_n(warm_start->values().begin(), region.interior_size(), cur.begin());
    }
    std::vector<double> next = cur;

    const double omega = config.method == SolverMethod::SOR ? config.omega : 1.0;
    const double tol = config.tolerance;
    // Updates below this are rounding noise; the error estimate is not
    // meaningful there.
    const double noise_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, boundary.max_abs());

    SolveReport report;
    std::deque<double> norms;
    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        double upd;
        if (config.method == SolverMethod::Jacobi) {
            upd = jacobi_sweep(region, cur.data(), next.data(), config.threads);
            std::swap(cur, next);
        } else {
            upd = relaxation_sweep(region, cur.data(), omega);
        }
        report.iterations = it;
        report.final_update_sup = upd;
        norms.push_back(upd);
        if (norms.size() > kRatioWindow + 1) {
            norms.pop_front();
        }
        if (upd > tol) {
            continue;
        }
        // The update alone underestimates the error by 1/(1 - rho); require
        // the geometric tail bound to be within tolerance as well.
        bool tail_ok = upd <= noise_floor;
        if (!tail_ok && norms.size() == kRatioWindow + 1 && norms.front() > 0.0) {
            double rho = std::pow(upd / norms.front(), 1.0 / static_cast<double>(kRatioWindow));
            tail_ok = rho < 1.0 && upd * rho / (1.0 - rho) <= tol;
        }
        if (!tail_ok) {
            continue;
        }
        report.final_residual_sup = residual_sup(region, cur.data());
        if (report.final_residual_sup <= tol) {
            report.converged = true;
            break;
        }
    }
    if (!report.converged) {
        report.final_residual_sup = residual_sup(region, cur.data());
    }
    report.contraction_estimate = median_ratio(norms);

    ScalarField field(region_ptr, std::move(cur));
    if (!report.converged) {
        throw NotConvergedError(std::move(field), report);
    }
    return {std::move(field), report};
}

ScalarField solve_direct(const BoundaryValues& boundary, std::size_t max_unknowns)
{
    const auto& region_ptr = boundary.region();
    const Region& region = *region_ptr;
    require_interior(region);
    const auto n = region.interior_size();
    if (n > max_unknowns) {
        throw Error(ErrorCode::TooLarge, "direct solve: " + std::to_string(n)
                                             + " unknowns exceed the cap of "
                                             + std::to_string(max_unknowns));
    }

    const auto& w = region.stencil().weights_double();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * (region.stencil().size() + 1));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        triplets.emplace_back(row, row, 1.0);
        auto nb = region.neighbors(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (region.is_interior_index(nb[k])) {
                triplets.emplace_back(row, static_cast<Eigen::Index>(nb[k]), -w[k]);
            } else {
                rhs[row] += w[k] * boundary[nb[k] - n];
            }
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

    // The matrix is a symmetric M-matrix for both stencils; LU is the fallback.
    Eigen::VectorXd x;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_inverse;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    if (ldlt.info() == Eigen::Success) {
        apply_inverse = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd { return ldlt.solve(b); };
    } else {
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            throw Error(ErrorCode::InvalidArgument, "direct solve: factorization failed");
        }
        apply_inverse = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd { return lu.solve(b); };
    }
    x = apply_inverse(rhs);

    const double target = 1e-12 * (1.0 + boundary.max_abs());
    for (int pass = 0; pass < 3; ++pass) {
        Eigen::VectorXd r = rhs - A * x;
        if (r.lpNorm<Eigen::Infinity>() <= target * 1e-2) {
            break;
        }
        x += apply_inverse(r);
    }

    std::vector<double> values(region.cell_count());
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = x[static_cast<Eigen::Index>(i)];
    }
    std::copy(boundary.values().begin(), boundary.values().end(),
              values.begin() + static_cast<std::ptrdiff_t>(n));
    return ScalarField(region_ptr, std::move(values));
}

Solution solve(const BoundaryValues& boundary, const SolverConfig& config)
{
    if (config.method != SolverMethod::Direct) {
        return solve_iterative(boundary, config);
    }
    auto field = solve_direct(boundary, config.direct_max_unknowns);
    SolveReport report;
    report.final_residual_sup = mean_value_residual_sup(field);
    report.converged = true;
    return {std::move(field), report};
}

double estimate_contraction(const BoundaryValues& boundary, std::size_t iterations)
{
    if (iterations < kRatioWindow + 2) {
        throw Error(ErrorCode::InvalidArgument, "estimate_contraction needs at least 12 iterations");
    }
    const Region& region = *boundary.region();
    require_interior(region);
    auto start = ScalarField::from_boundary(boundary, 0.0);
    std::vector<double> cur(start.values().begin(), start.values().end());
    std::vector<double> next = cur;
    std::deque<double> norms;
    for (std::size_t it = 0; it < iterations; ++it) {
        double upd = jacobi_sweep(region, cur.data(), next.data(), 1);
        std::swap(cur, next);
        norms.push_back(upd);
        if (norms.size() > kRatioWindow + 1) {
            norms.pop_front();
        }
        if (upd == 0.0) {
            return 0.0;
        }
    }
    return *median_ratio(norms);
}

} // namespace harmonic
