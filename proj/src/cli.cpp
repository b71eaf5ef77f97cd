#include "harmonic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "harmonic/continuum.hpp"
#include "harmonic/io.hpp"
#include "harmonic/lattice.hpp"
#include "harmonic/montecarlo.hpp"
#include "harmonic/solvers.hpp"

namespace harmonic::cli {

using json = nlohmann::ordered_json;

namespace {

struct RegionBuildArgs {
    std::string shape;
    double tau = 0.0;
    std::string out;
    std::string seed_cell;
    std::string domain;
    std::string center = "0,0";
    double radius = 1.0;
    std::string vertices;
    std::string origin = "0,0";
    std::string mask;
    std::string stencil = "von_neumann";
    std::string trace;
    double boundary_value = 0.0;
};

struct SolveArgs {
    std::string region;
    std::string method;
    double omega = 1.5;
    double tol = 1e-10;
    std::size_t max_iter = 1'000'000;
    int threads = 1;
    std::string out;
    std::string pgm;
    std::string report;
};

struct WalkArgs {
    std::string region;
    std::string cell;
    std::uint64_t walks = 0;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 100'000'000;
    int threads = 1;
    std::string out;
};

struct RuinArgs {
    std::int64_t start = 0;
    std::int64_t target = 0;
};

struct DiscretizeArgs {
    std::string domain;
    std::string trace;
    double tau = 0.0;
    std::string method = "sor";
    double omega = 1.5;
    double tol = 1e-10;
    std::size_t max_iter = 1'000'000;
    int threads = 1;
    std::string origin = "0,0";
    std::string out;
    std::string pgm;
    std::string region_out;
    std::vector<std::string> eval;
};

struct MeasureArgs {
    std::string domain;
    std::string arcs;
    std::string point;
    double tau = 0.0;
    std::uint64_t walks = 0;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 100'000'000;
    int threads = 1;
    std::string origin = "0,0";
    std::string out;
};

struct VerifyArgs {
    std::string field;
    std::string region;
    double tol = 1e-10;
};

json cell_json(const CellIndex& c)
{
    json a = json::array();
    for (int k = 0; k < c.dim; ++k) {
        a.push_back(c[k]);
    }
    return a;
}

void emit(std::ostream& out, const std::string& text, const std::string& path)
{
    out << text << '\n';
    if (!path.empty()) {
        io::write_file(path, text + "\n");
    }
}

std::vector<CellIndex> read_mask(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    std::vector<CellIndex> cells;
    const auto rows = static_cast<std::int32_t>(lines.size());
    for (std::int32_t r = 0; r < rows; ++r) {
        const auto& l = lines[static_cast<std::size_t>(r)];
        for (std::size_t col = 0; col < l.size(); ++col) {
            char ch = l[col];
            if (ch == '#' || ch == '1' || ch == 'X' || ch == 'x') {
                cells.emplace_back(static_cast<std::int32_t>(col), rows - 1 - r);
            } else if (ch != '.' && ch != '0' && ch != ' ') {
                throw Error(ErrorCode::Parse, std::string("mask: unexpected character '") + ch + "'");
            }
        }
    }
    if (cells.empty()) {
        throw Error(ErrorCode::EmptyCellSet, "mask selects no cells");
    }
    return cells;
}

Domain domain_from_args(const RegionBuildArgs& a)
{
    if (!a.domain.empty()) {
        return io::read_domain_json(io::read_file(a.domain));
    }
    if (a.shape == "disk") {
        return Domain(Disk{io::parse_point(a.center), a.radius});
    }
    if (a.vertices.empty()) {
        throw Error(ErrorCode::InvalidArgument, "polygon needs --vertices or --domain");
    }
    Polygon p;
    std::istringstream in(a.vertices);
    std::string tok;
    while (std::getline(in, tok, ';')) {
        if (!tok.empty()) {
            p.vertices.push_back(io::parse_point(tok));
        }
    }
    return Domain(std::move(p));
}

int cmd_region_build(const RegionBuildArgs& a, std::ostream& out)
{
    std::optional<CellIndex> seed;
    if (!a.seed_cell.empty()) {
        seed = io::parse_cell(a.seed_cell, ',');
    }
    std::optional<BoundaryValues> boundary;
    if (a.shape == "mask") {
        if (a.mask.empty()) {
            throw Error(ErrorCode::InvalidArgument, "--shape mask needs --mask PATH");
        }
        auto cells = read_mask(io::read_file(a.mask));
        if (a.stencil != "moore" && a.stencil != "von_neumann") {
            throw Error(ErrorCode::InvalidArgument, "unknown stencil '" + a.stencil + "'");
        }
        auto stencil = a.stencil == "moore" ? Stencil::moore(2) : Stencil::von_neumann(2);
        auto region = build_region(cells, stencil, seed);
        boundary = BoundaryValues::constant(region, a.boundary_value);
    } else {
        if (!(a.tau > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "--tau must be positive for disk and polygon shapes");
        }
        auto domain = domain_from_args(a);
        if ((a.shape == "disk") != domain.is_disk()) {
            throw Error(ErrorCode::InvalidArgument, "--shape does not match the domain file");
        }
        MeshSpec mesh{a.tau, io::parse_point(a.origin)};
        auto disc = discretize(domain, mesh, seed);
        if (a.trace.empty()) {
            boundary = BoundaryValues::constant(disc.region, a.boundary_value);
        } else {
            boundary = sample_boundary(disc, io::read_trace_json(io::read_file(a.trace)));
        }
    }
    io::write_file(a.out, io::write_region_json(*boundary));
    const auto& region = *boundary->region();
    json summary;
    summary["interior"] = region.interior_size();
    summary["boundary"] = region.boundary_size();
    summary["discarded"] = region.discarded().size();
    summary["out"] = a.out;
    out << summary.dump() << '\n';
    return kExitOk;
}

SolverConfig solver_config(const std::string& method, double omega, double tol,
                           std::size_t max_iter, int threads)
{
    SolverConfig cfg;
    cfg.method = parse_solver_method(method);
    cfg.omega = omega;
    cfg.tolerance = tol;
    cfg.max_iterations = max_iter;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
}

int cmd_solve(const SolveArgs& a, std::ostream& out)
{
    auto cfg = solver_config(a.method, a.omega, a.tol, a.max_iter, a.threads);
    auto boundary = io::read_region_json(io::read_file(a.region));

    auto write_outputs = [&](const ScalarField& field, const SolveReport& report) {
        io::write_file(a.out, io::write_field_csv(field));
        if (!a.pgm.empty()) {
            io::write_file(a.pgm, io::write_field_pgm(field));
        }
        emit(out, io::solve_report_json(report), a.report);
    };
    try {
        auto sol = solve(boundary, cfg);
        write_outputs(sol.field, sol.report);
        return kExitOk;
    } catch (const NotConvergedError& e) {
        write_outputs(e.partial(), e.report());
        return kExitIncomplete;
    }
}

int cmd_walk(const WalkArgs& a, std::ostream& out)
{
    auto boundary = io::read_region_json(io::read_file(a.region));
    WalkConfig cfg{a.walks, a.seed, a.max_steps, a.threads};
    auto result = solve_monte_carlo(boundary, io::parse_cell(a.cell, ','), cfg);
    emit(out, io::ensemble_json(result, *boundary.region()), a.out);
    return result.truncated > 0 ? kExitIncomplete : kExitOk;
}

int cmd_ruin(const RuinArgs& a, std::ostream& out)
{
    auto p = gambler_ruin_exact(a.start, a.target);
    json j;
    j["exact"] = p.to_string();
    j["decimal"] = p.to_double();
    out << j.dump() << '\n';
    return kExitOk;
}

int cmd_discretize(const DiscretizeArgs& a, std::ostream& out)
{
    auto cfg = solver_config(a.method, a.omega, a.tol, a.max_iter, a.threads);
    auto domain = io::read_domain_json(io::read_file(a.domain));
    auto trace = io::read_trace_json(io::read_file(a.trace));
    MeshSpec mesh{a.tau, io::parse_point(a.origin)};

    auto disc = discretize(domain, mesh);
    auto boundary = sample_boundary(disc, trace);
    if (!a.region_out.empty()) {
        io::write_file(a.region_out, io::write_region_json(boundary));
    }
    int code = kExitOk;
    std::optional<ContinuumSolution> sol;
    try {
        auto s = solve(boundary, cfg);
        sol.emplace(ContinuumSolution{disc, std::move(s.field), s.report});
    } catch (const NotConvergedError& e) {
        sol.emplace(ContinuumSolution{disc, e.partial(), e.report()});
        code = kExitIncomplete;
    }
    io::write_file(a.out, io::write_field_csv(sol->field));
    if (!a.pgm.empty()) {
        io::write_file(a.pgm, io::write_field_pgm(sol->field));
    }

    json j;
    j["tau"] = a.tau;
    j["method"] = a.method;
    j["interior"] = disc.region->interior_size();
    j["boundary"] = disc.region->boundary_size();
    j["report"] = json::parse(io::solve_report_json(sol->report));
    json evals = json::array();
    for (const auto& e : a.eval) {
        auto p = io::parse_point(e);
        json item;
        item["point"] = json::array({p.x, p.y});
        item["value"] = sol->evaluate(p);
        evals.push_back(std::move(item));
    }
    j["eval"] = std::move(evals);
    out << j.dump() << '\n';
    return code;
}

int cmd_measure(const MeasureArgs& a, std::ostream& out)
{
    auto domain = io::read_domain_json(io::read_file(a.domain));
    auto arcs = io::read_arcs_json(io::read_file(a.arcs));
    auto point = io::parse_point(a.point);
    MeshSpec mesh{a.tau, io::parse_point(a.origin)};
    WalkConfig cfg{a.walks, a.seed, a.max_steps, a.threads};
    auto result = harmonic_measure(domain, arcs, point, mesh, cfg);
    emit(out, io::harmonic_measure_json(result, arcs, a.seed, a.walks, a.tau, point), a.out);
    return result.truncated > 0 ? kExitIncomplete : kExitOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out)
{
    if (!(a.tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
    }
    auto boundary = io::read_region_json(io::read_file(a.region));
    auto field = io::read_field_csv(io::read_file(a.field), boundary.region());
    const double scale = 1.0 + boundary.max_abs();
    const double threshold = a.tol * scale;

    auto residual = mean_value_residual(field);
    auto mp = check_maximum_principle(field, threshold);
    double mismatch = 0.0;
    auto fb = field.boundary_values();
    for (std::size_t b = 0; b < fb.values().size(); ++b) {
        mismatch = std::max(mismatch, std::abs(fb[b] - boundary[b]));
    }
    bool residual_ok = residual.sup_norm <= threshold;
    bool boundary_ok = mismatch <= threshold;

    json j;
    j["max_residual"] = residual.sup_norm;
    j["residual_threshold"] = threshold;
    j["residual"] = residual_ok ? "pass" : "fail";
    j["maximum_principle"] = mp.passes ? "pass" : "fail";
    j["interior_max"] = mp.interior_max;
    j["interior_min"] = mp.interior_min;
    j["boundary_max"] = mp.boundary_max;
    j["boundary_min"] = mp.boundary_min;
    j["witness"] = mp.witness ? cell_json(*mp.witness) : json(nullptr);
    j["boundary_mismatch"] = mismatch;
    bool ok = residual_ok && mp.passes && boundary_ok;
    j["passes"] = ok;
    out << j.dump() << '\n';
    return ok ? kExitOk : kExitFailedCheck;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Lattice harmonic-function toolkit", "harmonic"};
    app.require_subcommand(1);

    RegionBuildArgs rb;
    auto* region_cmd = app.add_subcommand("region", "Region construction");
    region_cmd->require_subcommand(1);
    auto* build_cmd = region_cmd->add_subcommand("build", "Build a region and write region JSON");
    build_cmd->add_option("--shape", rb.shape, "disk, polygon or mask")
        ->required()
        ->check(CLI::IsMember({"disk", "polygon", "mask"}));
    build_cmd->add_option("--tau", rb.tau, "Mesh size for disk and polygon shapes");
    build_cmd->add_option("--out", rb.out, "Output region JSON")->required();
    build_cmd->add_option("--seed-cell", rb.seed_cell, "Component seed, i,j");
    build_cmd->add_option("--domain", rb.domain, "Domain JSON (disk or polygon)");
    build_cmd->add_option("--center", rb.center, "Disk centre x,y");
    build_cmd->add_option("--radius", rb.radius, "Disk radius");
    build_cmd->add_option("--vertices", rb.vertices, "Polygon vertices x,y;x,y;...");
    build_cmd->add_option("--origin", rb.origin, "Lattice origin x,y");
    build_cmd->add_option("--mask", rb.mask, "Mask text file ('#' marks a cell)");
    build_cmd->add_option("--stencil", rb.stencil, "von_neumann or moore (mask only)");
    build_cmd->add_option("--trace", rb.trace, "Boundary trace JSON");
    build_cmd->add_option("--boundary-value", rb.boundary_value, "Constant boundary value");

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the Dirichlet problem on a region");
    solve_cmd->add_option("--region", sa.region, "Region JSON")->required();
    solve_cmd->add_option("--method", sa.method, "jacobi, gauss-seidel, sor or direct")
        ->required()
        ->check(CLI::IsMember({"jacobi", "gauss-seidel", "sor", "direct"}));
    solve_cmd->add_option("--omega", sa.omega, "SOR relaxation factor");
    solve_cmd->add_option("--tol", sa.tol, "Sup-norm tolerance");
    solve_cmd->add_option("--max-iter", sa.max_iter, "Iteration limit");
    solve_cmd->add_option("--threads", sa.threads, "Jacobi worker threads");
    solve_cmd->add_option("--out", sa.out, "Output field CSV")->required();
    solve_cmd->add_option("--pgm", sa.pgm, "Output PGM image (2D)");
    solve_cmd->add_option("--report", sa.report, "Output solve report JSON");

    WalkArgs wa;
    auto* walk_cmd = app.add_subcommand("walk", "Monte-Carlo estimate at one cell");
    walk_cmd->add_option("--region", wa.region, "Region JSON")->required();
    walk_cmd->add_option("--cell", wa.cell, "Start cell i,j")->required();
    walk_cmd->add_option("--walks", wa.walks, "Number of walks")->required();
    walk_cmd->add_option("--seed", wa.seed, "Random seed")->required();
    walk_cmd->add_option("--max-steps", wa.max_steps, "Per-walk step limit");
    walk_cmd->add_option("--threads", wa.threads, "Worker threads");
    walk_cmd->add_option("--out", wa.out, "Also write the JSON here");

    RuinArgs ra;
    auto* ruin_cmd = app.add_subcommand("ruin", "Exact gambler's ruin probability");
    ruin_cmd->add_option("--start", ra.start, "Starting capital")->required();
    ruin_cmd->add_option("--target", ra.target, "Target capital")->required();

    DiscretizeArgs da;
    auto* disc_cmd = app.add_subcommand("discretize", "Discretize a domain and solve");
    disc_cmd->add_option("--domain", da.domain, "Domain JSON")->required();
    disc_cmd->add_option("--trace", da.trace, "Boundary trace JSON")->required();
    disc_cmd->add_option("--tau", da.tau, "Mesh size")->required();
    disc_cmd->add_option("--method", da.method, "jacobi, gauss-seidel, sor or direct")
        ->check(CLI::IsMember({"jacobi", "gauss-seidel", "sor", "direct"}));
    disc_cmd->add_option("--omega", da.omega, "SOR relaxation factor");
    disc_cmd->add_option("--tol", da.tol, "Sup-norm tolerance");
    disc_cmd->add_option("--max-iter", da.max_iter, "Iteration limit");
    disc_cmd->add_option("--threads", da.threads, "Jacobi worker threads");
    disc_cmd->add_option("--origin", da.origin, "Lattice origin x,y");
    disc_cmd->add_option("--out", da.out, "Output field CSV")->required();
    disc_cmd->add_option("--pgm", da.pgm, "Output PGM image");
    disc_cmd->add_option("--region-out", da.region_out, "Also write the region JSON");
    disc_cmd->add_option("--eval", da.eval, "Evaluate the solution at x,y (repeatable)");

    MeasureArgs ma;
    auto* measure_cmd = app.add_subcommand("measure", "Harmonic measure of disk arcs");
    measure_cmd->add_option("--domain", ma.domain, "Domain JSON (disk)")->required();
    measure_cmd->add_option("--arcs", ma.arcs, "Arcs JSON")->required();
    measure_cmd->add_option("--point", ma.point, "Start point x,y")->required();
    measure_cmd->add_option("--tau", ma.tau, "Mesh size")->required();
    measure_cmd->add_option("--walks", ma.walks, "Number of walks")->required();
    measure_cmd->add_option("--seed", ma.seed, "Random seed")->required();
    measure_cmd->add_option("--max-steps", ma.max_steps, "Per-walk step limit");
    measure_cmd->add_option("--threads", ma.threads, "Worker threads");
    measure_cmd->add_option("--origin", ma.origin, "Lattice origin x,y");
    measure_cmd->add_option("--out", ma.out, "Also write the JSON here");

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "Check mean-value residual and maximum principle");
    verify_cmd->add_option("--field", va.field, "Field CSV")->required();
    verify_cmd->add_option("--region", va.region, "Region JSON")->required();
    verify_cmd->add_option("--tol", va.tol, "Relative tolerance");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        if (build_cmd->parsed()) return cmd_region_build(rb, out);
        if (solve_cmd->parsed()) return cmd_solve(sa, out);
        if (walk_cmd->parsed()) return cmd_walk(wa, out);
        if (ruin_cmd->parsed()) return cmd_ruin(ra, out);
        if (disc_cmd->parsed()) return cmd_discretize(da, out);
        if (measure_cmd->parsed()) return cmd_measure(ma, out);
        if (verify_cmd->parsed()) return cmd_verify(va, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: Parse: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    err << app.help();
    return kExitUsage;
}

} // namespace harmonic::cli
