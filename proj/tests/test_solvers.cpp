#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "harmonic/solvers.hpp"
#include "oracles.hpp"

using namespace harmonic;

namespace {

BoundaryValues gambler_region(int target)
{
    std::vector<CellIndex> cells;
    for (int i = 1; i < target; ++i) cells.emplace_back(i);
    auto r = build_region(cells, Stencil::von_neumann(1));
    return BoundaryValues::from_map(r, {{CellIndex(0), 0.0}, {CellIndex(target), 1.0}});
}

RegionPtr block_region(int n)
{
    std::vector<CellIndex> cells;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cells.emplace_back(i, j);
    return build_region(cells, Stencil::von_neumann(2));
}

BoundaryValues random_boundary(std::mt19937_64& rng, const RegionPtr& r)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return BoundaryValues::from_function(r, [&](const CellIndex&) { return u(rng); });
}

double sup_diff(const ScalarField& a, const ScalarField& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

SolverConfig config(SolverMethod m, double tol = 1e-10)
{
    SolverConfig c;
    c.method = m;
    c.tolerance = tol;
    return c;
}

} // namespace

TEST_CASE("apply_T")
{
    auto r = block_region(3);
    auto zero = ScalarField::from_function(r, [](const CellIndex&) { return 0.0; });
    auto tz = apply_T(zero);
    for (double v : tz.values()) CHECK(v == 0.0);

    std::vector<CellIndex> cells{CellIndex(1), CellIndex(2), CellIndex(3)};
    auto line = build_region(cells, Stencil::von_neumann(1));
    auto bv = BoundaryValues::from_map(line, {{CellIndex(0), 0.0}, {CellIndex(4), 1.0}});
    auto g0 = ScalarField::from_boundary(bv);
    auto g1 = apply_T(g0);
    CHECK(g1.at(CellIndex(1)) == 0.0);
    CHECK(g1.at(CellIndex(2)) == 0.0);
    CHECK(g1.at(CellIndex(3)) == 0.5);
    CHECK(g1.at(CellIndex(4)) == 1.0);
    CHECK(g0.at(CellIndex(3)) == 0.0);

    std::mt19937_64 rng(5);
    auto rr = build_region(oracle::random_cells(rng, 8, 8, 0.7), Stencil::von_neumann(2));
    auto solved = solve_direct(random_boundary(rng, rr));
    CHECK(sup_diff(apply_T(solved), solved) <= 1e-12);
}

TEST_CASE("apply_T is a convex, monotone map and thread-count independent")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto stencil = trial % 2 ? Stencil::moore(2) : Stencil::von_neumann(2);
        auto r = build_region(oracle::random_cells(rng, 9, 9, 0.7), stencil);
        std::vector<double> f(r->cell_count()), g(r->cell_count());
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = u(rng);
            g[i] = f[i] + std::abs(u(rng));
        }
        ScalarField F(r, f), G(r, g);
        auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        auto TF = apply_T(F);
        auto TG = apply_T(G);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(TF[i] >= *lo);
            CHECK(TF[i] <= *hi);
            CHECK(TF[i] <= TG[i]);
        }
        auto TF4 = apply_T(F, 4);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(TF4[i] == TF[i]);
    }
}

TEST_CASE("solve_direct: gambler's ruin is linear in the capital")
{
    auto bv = gambler_region(100);
    auto f = solve_direct(bv);
    for (int k = 0; k <= 100; ++k) {
        CHECK(std::abs(f.at(CellIndex(k)) - k / 100.0) <= 1e-12);
    }
    CHECK(std::abs(f.at(CellIndex(30)) - 0.3) <= 1e-12);
}

TEST_CASE("solve_direct: single interior cell averages its neighbours")
{
    std::vector<CellIndex> one{{0, 0}};
    auto r = build_region(one, Stencil::von_neumann(2));
    auto bv = BoundaryValues(r, {1.0, 2.0, 3.0, 4.0});
    CHECK(std::abs(solve_direct(bv).at(CellIndex(0, 0)) - 2.5) <= 1e-15);
}

TEST_CASE("solve_direct: 2x2 block with a hot top edge")
{
    std::vector<CellIndex> cells{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
    auto r = build_region(cells, Stencil::von_neumann(2));
    auto hot = [](const CellIndex& c) { return c[1] >= 3 ? 1.0 : 0.0; };
    auto f = solve_direct(BoundaryValues::from_function(r, hot));

    // By symmetry a = f(1,1) = f(2,1) and c = f(1,2) = f(2,2):
    // 4a = a + c and 4c = c + a + 1, so a = 1/8 and c = 3/8.
    CHECK(std::abs(f.at(CellIndex(1, 1)) - 0.125) <= 1e-15);
    CHECK(std::abs(f.at(CellIndex(2, 1)) - 0.125) <= 1e-15);
    CHECK(std::abs(f.at(CellIndex(1, 2)) - 0.375) <= 1e-15);
    CHECK(std::abs(f.at(CellIndex(2, 2)) - 0.375) <= 1e-15);

    auto dense = oracle::dense_dirichlet_2d({cells.begin(), cells.end()}, hot);
    for (const auto& [c, v] : dense) CHECK(std::abs(f.at(c) - v) <= 1e-15);
}

TEST_CASE("solve_direct agrees with dense elimination on random regions")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 15; ++trial) {
        auto r = build_region(oracle::random_cells(rng, 8, 8, 0.7), Stencil::von_neumann(2));
        auto bv = random_boundary(rng, r);
        auto f = solve_direct(bv);
        std::set<CellIndex> interior(r->interior().begin(), r->interior().end());
        auto dense = oracle::dense_dirichlet_2d(interior, [&](const CellIndex& c) { return bv.at(c); });
        for (const auto& [c, v] : dense) CHECK(std::abs(f.at(c) - v) <= 1e-12);
        CHECK(mean_value_residual(f).sup_norm <= 1e-10 * (1.0 + bv.max_abs()));
    }
}

TEST_CASE("solve_direct is linear in the boundary data")
{
    std::mt19937_64 rng(4);
    auto r = build_region(oracle::random_cells(rng, 10, 10, 0.8), Stencil::von_neumann(2));
    auto b1 = random_boundary(rng, r);
    auto b2 = random_boundary(rng, r);
    const double a = 2.5, b = -0.75;
    std::vector<double> mix(r->boundary_size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * b1[i] + b * b2[i];
    auto f1 = solve_direct(b1);
    auto f2 = solve_direct(b2);
    auto fm = solve_direct(BoundaryValues(r, mix));
    for (std::size_t i = 0; i < r->cell_count(); ++i) {
        CHECK(std::abs(fm[i] - (a * f1[i] + b * f2[i])) <= 1e-10);
    }
}

TEST_CASE("solve_direct: Moore stencil and 3D regions")
{
    std::mt19937_64 rng(8);
    auto r = build_region(oracle::random_cells(rng, 6, 6, 0.8), Stencil::moore(2));
    auto bv = random_boundary(rng, r);
    auto f = solve_direct(bv);
    CHECK(mean_value_residual(f).sup_norm <= 1e-12);

    std::vector<CellIndex> cube;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) cube.emplace_back(i, j, k);
    auto r3 = build_region(cube, Stencil::von_neumann(3));
    // x + 2y - 3z is discrete-harmonic for the 6-neighbour average.
    auto lin = [](const CellIndex& c) { return c[0] + 2.0 * c[1] - 3.0 * c[2]; };
    auto f3 = solve_direct(BoundaryValues::from_function(r3, lin));
    for (const auto& c : r3->interior()) CHECK(std::abs(f3.at(c) - lin(c)) <= 1e-12);
}

TEST_CASE("solve_direct: size cap")
{
    auto bv = gambler_region(100);
    try {
        solve_direct(bv, 50);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooLarge);
    }
}

TEST_CASE("solve_iterative: constant boundary data")
{
    auto r = block_region(5);
    for (auto m : {SolverMethod::Jacobi, SolverMethod::GaussSeidel, SolverMethod::SOR}) {
        auto sol = solve_iterative(BoundaryValues::constant(r, 0.7), config(m));
        CHECK(sol.report.converged);
        for (double v : sol.field.values()) CHECK(std::abs(v - 0.7) <= 1e-10);
        CHECK(sol.report.final_update_sup <= 1e-10);
        CHECK(sol.report.final_residual_sup <= 1e-10);
    }
}

TEST_CASE("solve_iterative: gambler's ruin reaches 3/10")
{
    auto bv = gambler_region(100);
    for (auto m : {SolverMethod::Jacobi, SolverMethod::GaussSeidel, SolverMethod::SOR}) {
        auto cfg = config(m);
        cfg.omega = 1.9;
        auto sol = solve_iterative(bv, cfg);
        CAPTURE(to_string(m));
        CHECK(sol.report.converged);
        CHECK(std::abs(sol.field.at(CellIndex(30)) - 0.3) <= 1e-8);
        REQUIRE(sol.report.contraction_estimate);
        CHECK(*sol.report.contraction_estimate < 1.0);
    }
}

TEST_CASE("solve_iterative agrees with solve_direct on random regions")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        auto r = build_region(oracle::random_cells(rng, 6, 6, 0.75), Stencil::von_neumann(2));
        auto bv = random_boundary(rng, r);
        auto direct = solve_direct(bv);
        const double tol = 1e-10;
        for (auto m : {SolverMethod::Jacobi, SolverMethod::GaussSeidel, SolverMethod::SOR}) {
            auto sol = solve_iterative(bv, config(m, tol));
            CHECK(sup_diff(sol.field, direct) <= 10 * tol);
            double scale = 1.0 + bv.max_abs();
            CHECK(check_maximum_principle(sol.field, 10 * tol * scale).passes);
        }
    }
}

TEST_CASE("solve_iterative: Jacobi with threads is bit-identical")
{
    std::mt19937_64 rng(13);
    auto r = build_region(oracle::random_cells(rng, 12, 12, 0.8), Stencil::von_neumann(2));
    auto bv = random_boundary(rng, r);
    auto c1 = config(SolverMethod::Jacobi);
    auto c4 = c1;
    c4.threads = 4;
    auto s1 = solve_iterative(bv, c1);
    auto s4 = solve_iterative(bv, c4);
    CHECK(s1.report.iterations == s4.report.iterations);
    for (std::size_t i = 0; i < r->cell_count(); ++i) CHECK(s1.field[i] == s4.field[i]);
}

TEST_CASE("solve_iterative: NotConverged carries the partial field")
{
    auto bv = gambler_region(100);
    auto cfg = config(SolverMethod::Jacobi);
    cfg.max_iterations = 50;
    try {
        solve_iterative(bv, cfg);
        FAIL("expected NotConverged");
    } catch (const NotConvergedError& e) {
        CHECK(e.code() == ErrorCode::NotConverged);
        CHECK(e.report().iterations == 50);
        CHECK_FALSE(e.report().converged);
        CHECK(e.partial().at(CellIndex(99)) > 0.0);
        CHECK(e.partial().at(CellIndex(100)) == 1.0);
    }
}

TEST_CASE("solve_iterative: warm start at the solution converges immediately")
{
    auto bv = gambler_region(20);
    auto exact = solve_direct(bv);
    auto sol = solve_iterative(bv, config(SolverMethod::GaussSeidel), &exact);
    CHECK(sol.report.iterations <= 2);
}

TEST_CASE("solver config validation")
{
    auto bv = gambler_region(10);
    auto bad = config(SolverMethod::SOR);
    bad.omega = 2.0;
    CHECK_THROWS_AS(solve_iterative(bv, bad), Error);
    bad.omega = 0.0;
    CHECK_THROWS_AS(solve_iterative(bv, bad), Error);
    auto zero_tol = config(SolverMethod::Jacobi, 0.0);
    CHECK_THROWS_AS(solve_iterative(bv, zero_tol), Error);
    auto no_iter = config(SolverMethod::Jacobi);
    no_iter.max_iterations = 0;
    CHECK_THROWS_AS(solve_iterative(bv, no_iter), Error);
    CHECK_THROWS_AS(solve_iterative(bv, config(SolverMethod::Direct)), Error);
    CHECK(parse_solver_method("gauss-seidel") == SolverMethod::GaussSeidel);
    CHECK_THROWS_AS(parse_solver_method("multigrid"), Error);
}

TEST_CASE("Jacobi update norms never increase")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto r = build_region(oracle::random_cells(rng, 9, 9, 0.7), Stencil::von_neumann(2));
        auto g = ScalarField::from_boundary(random_boundary(rng, r));
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 200; ++k) {
            auto next = apply_T(g);
            double upd = sup_diff(next, g);
            CHECK(upd <= prev * (1.0 + 1e-12) + 1e-15);
            prev = upd;
            g = std::move(next);
        }
        CHECK(estimate_contraction(g.boundary_values(), 200) < 1.0);
    }
}

TEST_CASE("estimate_contraction")
{
    std::vector<CellIndex> one{{0, 0}};
    auto single = build_region(one, Stencil::von_neumann(2));
    CHECK(estimate_contraction(BoundaryValues(single, {1.0, 2.0, 3.0, 4.0}), 20) == 0.0);

    const double rho = oracle::path_jacobi_spectral_radius(9);
    CHECK(std::abs(rho - std::cos(std::numbers::pi / 10)) <= 1e-9);
    auto path = gambler_region(10);
    double est = estimate_contraction(path, 300);
    CHECK(std::abs(est - rho) <= 0.02);

    auto block = BoundaryValues::constant(block_region(10), 1.0);
    double b = estimate_contraction(block, 300);
    CHECK(b > 0.0);
    CHECK(b < 1.0);

    CHECK_THROWS_AS(estimate_contraction(path, 11), Error);
}
