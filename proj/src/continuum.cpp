#include "harmonic/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace harmonic {

namespace {

double cross(Point o, Point a, Point b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(Point a, Point b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool on_segment(Point a, Point b, Point p, double eps)
{
    double len = distance(a, b);
    if (std::abs(cross(a, b, p)) > eps * std::max(len, 1.0)) {
        return false;
    }
    return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps
           && p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

bool segments_intersect(Point a, Point b, Point c, Point d)
{
    double d1 = cross(c, d, a);
    double d2 = cross(c, d, b);
    double d3 = cross(a, b, c);
    double d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return (d1 == 0 && on_segment(c, d, a, 0.0)) || (d2 == 0 && on_segment(c, d, b, 0.0))
           || (d3 == 0 && on_segment(a, b, c, 0.0)) || (d4 == 0 && on_segment(a, b, d, 0.0));
}

double signed_area(const std::vector<Point>& v)
{
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % v.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

double normalize_angle(double theta)
{
    if (theta < 0.0) {
        theta += kTwoPi;
    }
    if (theta >= kTwoPi) {
        theta -= kTwoPi;
    }
    return theta < 0.0 ? 0.0 : theta;
}

double normalize_parameter(double s)
{
    s -= std::floor(s);
    return s >= 1.0 ? 0.0 : s;
}

} // namespace

//---------------------------------------------------------------------------//
// Domain
//---------------------------------------------------------------------------//

Domain::Domain(Disk disk) : shape_(disk)
{
    if (!(disk.radius > 0.0) || !std::isfinite(disk.radius) || !std::isfinite(disk.center.x)
        || !std::isfinite(disk.center.y)) {
        throw Error(ErrorCode::InvalidArgument, "disk radius must be positive and finite");
    }
    perimeter_ = kTwoPi * disk.radius;
}

Domain::Domain(Polygon polygon) : shape_(std::move(polygon))
{
    const auto& v = std::get<Polygon>(shape_).vertices;
    if (v.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "polygon needs at least 3 vertices");
    }
    for (const auto& p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorCode::InvalidArgument, "polygon vertex is not finite");
        }
    }
    double a = signed_area(v);
    if (a == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "polygon has zero area");
    }
    if (a < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "polygon vertices must be counterclockwise");
    }
    const auto n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                continue;
            }
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
                throw Error(ErrorCode::InvalidArgument, "polygon is not simple");
            }
        }
    }
    cumulative_.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double len = distance(v[i], v[(i + 1) % n]);
        if (len == 0.0) {
            throw Error(ErrorCode::InvalidArgument, "polygon has repeated vertices");
        }
        cumulative_.push_back(cumulative_.back() + len);
    }
    perimeter_ = cumulative_.back();
}

const Disk& Domain::disk() const
{
    if (!is_disk()) {
        throw Error(ErrorCode::InvalidArgument, "domain is not a disk");
    }
    return std::get<Disk>(shape_);
}

const Polygon& Domain::polygon() const
{
    if (is_disk()) {
        throw Error(ErrorCode::InvalidArgument, "domain is not a polygon");
    }
    return std::get<Polygon>(shape_);
}

double Domain::area() const
{
    if (is_disk()) {
        double r = disk().radius;
        return 0.5 * kTwoPi * r * r;
    }
    return signed_area(polygon().vertices);
}

Point Domain::centroid() const
{
    if (is_disk()) {
        return disk().center;
    }
    const auto& v = polygon().vertices;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % v.size()];
        double c = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    double a6 = 6.0 * area();
    return {cx / a6, cy / a6};
}

bool Domain::contains(const Point& p) const
{
    if (is_disk()) {
        const auto& d = disk();
        double dx = p.x - d.center.x;
        double dy = p.y - d.center.y;
        return dx * dx + dy * dy <= d.radius * d.radius;
    }
    const auto& v = polygon().vertices;
    const auto n = v.size();
    const double eps = 1e-12 * std::max(1.0, perimeter_);
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(v[i], v[(i + 1) % n], p, eps)) {
            return true;
        }
    }
    // Even-odd rule, horizontal ray to +x.
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

BoundaryPoint Domain::nearest_boundary_point(const Point& p) const
{
    if (is_disk()) {
        const auto& d = disk();
        double dx = p.x - d.center.x;
        double dy = p.y - d.center.y;
        double theta = (dx == 0.0 && dy == 0.0) ? 0.0 : normalize_angle(std::atan2(dy, dx));
        return {{d.center.x + d.radius * std::cos(theta), d.center.y + d.radius * std::sin(theta)},
                normalize_parameter(theta / kTwoPi)};
    }
    const auto& v = polygon().vertices;
    const auto n = v.size();
    const double eps = 1e-12 * std::max(1.0, perimeter_);
    BoundaryPoint best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % n];
        double ex = b.x - a.x;
        double ey = b.y - a.y;
        double t = ((p.x - a.x) * ex + (p.y - a.y) * ey) / (ex * ex + ey * ey);
        t = std::clamp(t, 0.0, 1.0);
        Point q{a.x + t * ex, a.y + t * ey};
        double dist = distance(p, q);
        double s = normalize_parameter((cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]))
                                       / perimeter_);
        // Edges are visited in increasing parameter, so a tie keeps the
        // earlier point unless it wrapped around to s = 0.
        if (dist < best_dist - eps || (std::abs(dist - best_dist) <= eps && s < best.parameter)) {
            best_dist = std::min(dist, best_dist);
            best = {q, s};
        }
    }
    return best;
}

Point Domain::boundary_point(double parameter) const
{
    double s = normalize_parameter(parameter);
    if (is_disk()) {
        const auto& d = disk();
        double theta = s * kTwoPi;
        return {d.center.x + d.radius * std::cos(theta), d.center.y + d.radius * std::sin(theta)};
    }
    const auto& v = polygon().vertices;
    double target = s * perimeter_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    auto i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
    i = std::min(i, v.size() - 1);
    double t = (target - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

std::pair<Point, Point> Domain::bounds() const
{
    if (is_disk()) {
        const auto& d = disk();
        return {{d.center.x - d.radius, d.center.y - d.radius},
                {d.center.x + d.radius, d.center.y + d.radius}};
    }
    Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point hi{-lo.x, -lo.y};
    for (const auto& p : polygon().vertices) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    return {lo, hi};
}

//---------------------------------------------------------------------------//
// Traces
//---------------------------------------------------------------------------//

void Arc::validate() const
{
    if (!(begin >= 0.0 && begin < end && end <= kTwoPi)) {
        std::ostringstream os;
        os << "arc [" << begin << ", " << end << ") must satisfy 0 <= begin < end <= 2*pi";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

void validate_trace(const BoundaryTrace& trace, const Domain& domain)
{
    auto require_disk = [&] {
        if (!domain.is_disk()) {
            throw Error(ErrorCode::InvalidArgument, "arc traces are only valid on disk domains");
        }
    };
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, trace::HarmonicPolynomial>) {
                if (t.degree < 0) {
                    throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 0");
                }
            } else if constexpr (std::is_same_v<T, trace::ArcIndicator>) {
                require_disk();
                t.arc.validate();
            } else if constexpr (std::is_same_v<T, trace::ArcCombination>) {
                require_disk();
                for (const auto& [c, arc] : t.terms) {
                    arc.validate();
                    if (!std::isfinite(c)) {
                        throw Error(ErrorCode::InvalidArgument, "arc coefficient is not finite");
                    }
                }
            } else if constexpr (std::is_same_v<T, trace::Sampled>) {
                if (t.table.empty()) {
                    throw Error(ErrorCode::InvalidArgument, "sampled trace is empty");
                }
                for (std::size_t i = 0; i < t.table.size(); ++i) {
                    double s = t.table[i].first;
                    if (!(s >= 0.0 && s < 1.0) || (i > 0 && !(s > t.table[i - 1].first))) {
                        throw Error(ErrorCode::InvalidArgument,
                                    "sampled trace parameters must be increasing in [0, 1)");
                    }
                }
            }
        },
        trace);
}

double evaluate_trace(const BoundaryTrace& trace, [[maybe_unused]] const Domain& domain,
                      const BoundaryPoint& bp)
{
    return std::visit(
        [&](const auto& t) -> double {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, trace::Constant>) {
                return t.value;
            } else if constexpr (std::is_same_v<T, trace::HarmonicPolynomial>) {
                return harmonic_polynomial(t.degree, t.part, bp.point);
            } else if constexpr (std::is_same_v<T, trace::ArcIndicator>) {
                return t.arc.contains(normalize_angle(Domain::angle_of(bp.parameter))) ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, trace::ArcCombination>) {
                double angle = normalize_angle(Domain::angle_of(bp.parameter));
                double sum = 0.0;
                for (const auto& [c, arc] : t.terms) {
                    if (arc.contains(angle)) {
                        sum += c;
                    }
                }
                return sum;
            } else {
                const auto& tab = t.table;
                if (tab.size() == 1) {
                    return tab.front().second;
                }
                double s = bp.parameter;
                auto it = std::upper_bound(tab.begin(), tab.end(), s,
                                           [](double v, const auto& e) { return v < e.first; });
                std::pair<double, double> lo;
                std::pair<double, double> hi;
                if (it == tab.begin()) {
                    lo = {tab.back().first - 1.0, tab.back().second};
                    hi = tab.front();
                } else if (it == tab.end()) {
                    lo = tab.back();
                    hi = {tab.front().first + 1.0, tab.front().second};
                } else {
                    lo = *(it - 1);
                    hi = *it;
                }
                double u = (s - lo.first) / (hi.first - lo.first);
                return lo.second + u * (hi.second - lo.second);
            }
        },
        trace);
}

//---------------------------------------------------------------------------//
// Analytic checks
//---------------------------------------------------------------------------//

double harmonic_polynomial(int n, Part part, Point p)
{
    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 0");
    }
    const std::complex<double> z(p.x, p.y);
    std::complex<double> w(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
        w *= z;
    }
    return part == Part::Re ? w.real() : w.imag();
}

double circle_mean(const PlaneFunction& f, Point center, double radius, int quadrature_points)
{
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "circle radius must be positive");
    }
    if (quadrature_points < 8) {
        throw Error(ErrorCode::InvalidArgument, "circle_mean needs at least 8 quadrature points");
    }
    double sum = 0.0;
    for (int k = 0; k < quadrature_points; ++k) {
        double theta = kTwoPi * k / quadrature_points;
        sum += f({center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)});
    }
    return sum / quadrature_points;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be positive");
    }
    std::vector<double> nodes(static_cast<std::size_t>(n));
    std::vector<double> weights(static_cast<std::size_t>(n));
    const double pi = 0.5 * kTwoPi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        if (n == 1) {
            x = 0.0;
            dp = 1.0;
        }
        auto lo = static_cast<std::size_t>(i);
        auto hi = static_cast<std::size_t>(n - 1 - i);
        nodes[lo] = -x;
        nodes[hi] = x;
        weights[lo] = weights[hi] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return {nodes, weights};
}

double disk_mean(const PlaneFunction& f, Point center, double radius, int radial_rings,
                 int quadrature_points)
{
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
    }
    if (radial_rings < 4) {
        throw Error(ErrorCode::InvalidArgument, "disk_mean needs at least 4 radial rings");
    }
    auto [nodes, weights] = gauss_legendre(radial_rings);
    // (1/(pi R^2)) int_0^R 2 pi r m(r) dr with r = R (t + 1) / 2.
    double sum = 0.0;
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        double r = 0.5 * radius * (nodes[m] + 1.0);
        sum += weights[m] * (r / radius) * circle_mean(f, center, r, quadrature_points);
    }
    return sum;
}

//---------------------------------------------------------------------------//
// Discretization
//---------------------------------------------------------------------------//

void MeshSpec::validate() const
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw Error(ErrorCode::InvalidArgument, "mesh size tau must be positive");
    }
}

Point MeshSpec::lower_left(const CellIndex& c) const
{
    return {origin.x + tau * c[0], origin.y + tau * c[1]};
}

Point MeshSpec::cell_center(const CellIndex& c) const
{
    return {origin.x + tau * (c[0] + 0.5), origin.y + tau * (c[1] + 0.5)};
}

CellIndex MeshSpec::cell_containing(Point p) const
{
    double i = std::floor((p.x - origin.x) / tau);
    double j = std::floor((p.y - origin.y) / tau);
    constexpr double lim = std::numeric_limits<std::int32_t>::max() / 2;
    if (!(std::abs(i) < lim && std::abs(j) < lim)) {
        throw Error(ErrorCode::OutOfRange, "point is too far from the lattice origin");
    }
    return {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)};
}

Discretization discretize(const Domain& domain, const MeshSpec& mesh,
                          std::optional<CellIndex> seed_cell)
{
    mesh.validate();
    const double tau = mesh.tau;
    if (!(domain.area() > 9.0 * tau * tau)) {
        throw Error(ErrorCode::NoInteriorCell, "mesh too coarse: domain area must exceed (3 tau)^2");
    }
    auto [lo, hi] = domain.bounds();
    auto c_lo = mesh.cell_containing(lo);
    auto c_hi = mesh.cell_containing(hi);
    double cells_x = static_cast<double>(c_hi[0]) - c_lo[0] + 3.0;
    double cells_y = static_cast<double>(c_hi[1]) - c_lo[1] + 3.0;
    if (cells_x * cells_y > 5e8) {
        throw Error(ErrorCode::TooLarge, "mesh too fine for the domain extent");
    }

    std::vector<CellIndex> candidates;
    for (auto i = c_lo[0] - 1; i <= c_hi[0] + 1; ++i) {
        for (auto j = c_lo[1] - 1; j <= c_hi[1] + 1; ++j) {
            Point a{mesh.origin.x + tau * i, mesh.origin.y + tau * j};
            Point b{mesh.origin.x + tau * (i + 1), mesh.origin.y + tau * (j + 1)};
            if (domain.contains(a) && domain.contains({b.x, a.y}) && domain.contains({a.x, b.y})
                && domain.contains(b)) {
                candidates.emplace_back(i, j);
            }
        }
    }
    if (candidates.empty()) {
        throw Error(ErrorCode::NoInteriorCell, "no lattice cell lies inside the domain");
    }

    CellIndex seed = candidates.front();
    if (seed_cell) {
        seed = *seed_cell;
    } else {
        // Candidates are generated in lexicographic order, so strict
        // comparison keeps the smallest cell on ties.
        auto centroid = domain.centroid();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : candidates) {
            double d = distance(mesh.cell_center(c), centroid);
            if (d < best) {
                best = d;
                seed = c;
            }
        }
    }
    auto region = build_region(candidates, Stencil::von_neumann(2), seed);

    std::vector<BoundaryPoint> points;
    points.reserve(region->boundary_size());
    for (const auto& c : region->boundary()) {
        points.push_back(domain.nearest_boundary_point(mesh.cell_center(c)));
    }
    return {domain, mesh, std::move(region), std::move(points)};
}

BoundaryValues sample_boundary(const Discretization& disc, const BoundaryTrace& trace)
{
    validate_trace(trace, disc.domain);
    if (disc.boundary_points.size() != disc.region->boundary_size()) {
        throw Error(ErrorCode::MissingCell, "cell map does not cover the region boundary");
    }
    std::vector<double> values;
    values.reserve(disc.boundary_points.size());
    for (const auto& bp : disc.boundary_points) {
        values.push_back(evaluate_trace(trace, disc.domain, bp));
    }
    return BoundaryValues(disc.region, std::move(values));
}

double ContinuumSolution::evaluate(Point p) const
{
    auto c = disc.mesh.cell_containing(p);
    auto idx = disc.region->index_of(c);
    if (!idx) {
        std::ostringstream os;
        os << "point (" << p.x << ", " << p.y << ") is outside the region cells";
        throw Error(ErrorCode::QueryOutsideRegion, os.str());
    }
    return field[*idx];
}

ContinuumSolution solve_continuum(const Domain& domain, const BoundaryTrace& trace,
                                  const MeshSpec& mesh, const SolverConfig& solver)
{
    auto disc = discretize(domain, mesh);
    auto boundary = sample_boundary(disc, trace);
    auto sol = solve(boundary, solver);
    return {std::move(disc), std::move(sol.field), sol.report};
}

HarmonicMeasureResult harmonic_measure(const Domain& domain, const std::vector<Arc>& arcs,
                                       Point point, const MeshSpec& mesh,
                                       const WalkConfig& config)
{
    if (!domain.is_disk()) {
        throw Error(ErrorCode::InvalidArgument, "harmonic measure of arcs needs a disk domain");
    }
    for (const auto& a : arcs) {
        a.validate();
    }
    const auto& d = domain.disk();
    if (std::hypot(point.x - d.center.x, point.y - d.center.y) >= d.radius) {
        throw Error(ErrorCode::PointOutside, "point is not strictly inside the disk");
    }
    auto disc = discretize(domain, mesh);
    auto cell = mesh.cell_containing(point);
    if (!disc.region->is_interior(cell)) {
        std::ostringstream os;
        os << "point's cell " << cell.to_string(',') << " is not interior at tau=" << mesh.tau
           << "; try tau <= " << mesh.tau / 2;
        throw Error(ErrorCode::CellNotInterior, os.str());
    }

    HarmonicMeasureResult out;
    out.start = cell;
    out.ensemble = hitting_distribution(disc.region, cell, config);
    out.completed = out.ensemble.completed;
    out.truncated = out.ensemble.truncated;
    out.counts.assign(arcs.size(), 0);
    for (std::size_t b = 0; b < out.ensemble.hits.size(); ++b) {
        auto h = out.ensemble.hits[b];
        if (h == 0) {
            continue;
        }
        double angle = normalize_angle(Domain::angle_of(disc.boundary_points[b].parameter));
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            if (arcs[a].contains(angle)) {
                out.counts[a] += h;
            }
        }
    }
    out.fractions.reserve(arcs.size());
    for (auto c : out.counts) {
        out.fractions.push_back(out.completed == 0 ? 0.0
                                                   : static_cast<double>(c)
                                                         / static_cast<double>(out.completed));
    }
    return out;
}

double arc_combination_value(const Domain& domain, const trace::ArcCombination& combination,
                             Point point, const MeshSpec& mesh, const WalkConfig& config)
{
    std::vector<Arc> arcs;
    for (const auto& term : combination.terms) {
        arcs.push_back(term.second);
    }
    auto hm = harmonic_measure(domain, arcs, point, mesh, config);
    double sum = 0.0;
    for (std::size_t j = 0; j < arcs.size(); ++j) {
        sum += combination.terms[j].first * hm.fractions[j];
    }
    return sum;
}

} // namespace harmonic
