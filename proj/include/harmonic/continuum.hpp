#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "harmonic/lattice.hpp"
#include "harmonic/montecarlo.hpp"
#include "harmonic/solvers.hpp"

namespace harmonic {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

//---------------------------------------------------------------------------//
// Domains
//---------------------------------------------------------------------------//

struct Disk {
    Point center;
    double radius = 1.0;
};

/// Simple polygon with counterclockwise vertices.
struct Polygon {
    std::vector<Point> vertices;
};

/// A point of the domain boundary together with its boundary parameter
/// s in [0, 1): the angle over 2*pi for disks, normalised arc length from
/// vertex 0 for polygons.
struct BoundaryPoint {
    Point point;
    double parameter = 0.0;
};

class Domain {
public:
    /// Validates the shape; throws Error(InvalidArgument) on a bad one.
    explicit Domain(Disk disk);
    explicit Domain(Polygon polygon);

    bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
    const Disk& disk() const;
    const Polygon& polygon() const;

    double area() const;
    Point centroid() const;
    /// Closed containment; points on the boundary count as inside.
    bool contains(const Point& p) const;
    /// Nearest point of the boundary, ties broken toward the smaller parameter.
    BoundaryPoint nearest_boundary_point(const Point& p) const;
    Point boundary_point(double parameter) const;
    /// Axis-aligned bounding box as (min, max).
    std::pair<Point, Point> bounds() const;

    /// Angle of a boundary parameter in [0, 2*pi); disks only.
    static double angle_of(double parameter) { return parameter * kTwoPi; }

private:
    std::variant<Disk, Polygon> shape_;
    double perimeter_ = 0.0;
    std::vector<double> cumulative_;
};

//---------------------------------------------------------------------------//
// Boundary traces
//---------------------------------------------------------------------------//

enum class Part { Re, Im };

/// Half-open angular interval [begin, end) with 0 <= begin < end <= 2*pi.
struct Arc {
    double begin = 0.0;
    double end = kTwoPi;

    void validate() const;
    bool contains(double angle) const { return angle >= begin && angle < end; }
};

namespace trace {
struct Constant {
    double value = 0.0;
};
struct HarmonicPolynomial {
    int degree = 0;
    Part part = Part::Re;
};
struct ArcIndicator {
    Arc arc;
};
struct ArcCombination {
    std::vector<std::pair<double, Arc>> terms;
};
/// (parameter, value) samples, sorted by parameter in [0, 1); evaluated by
/// periodic linear interpolation.
struct Sampled {
    std::vector<std::pair<double, double>> table;
};
} // namespace trace

using BoundaryTrace = std::variant<trace::Constant, trace::HarmonicPolynomial, trace::ArcIndicator,
                                   trace::ArcCombination, trace::Sampled>;

void validate_trace(const BoundaryTrace& trace, const Domain& domain);
double evaluate_trace(const BoundaryTrace& trace, const Domain& domain, const BoundaryPoint& bp);

//---------------------------------------------------------------------------//
// Analytic checks
//---------------------------------------------------------------------------//

/// Re or Im of (x + iy)^n by repeated complex multiplication.
double harmonic_polynomial(int n, Part part, Point p);

using PlaneFunction = std::function<double(Point)>;

/// Trapezoidal average over `quadrature_points` equally spaced circle points.
double circle_mean(const PlaneFunction& f, Point center, double radius,
                   int quadrature_points = 256);

/// Area average: Gauss-Legendre in r with weight 2r/R^2 over circle means.
double disk_mean(const PlaneFunction& f, Point center, double radius, int radial_rings = 64,
                 int quadrature_points = 256);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

//---------------------------------------------------------------------------//
// Discretization
//---------------------------------------------------------------------------//

struct MeshSpec {
    double tau = 0.1;
    Point origin;

    void validate() const;
    Point lower_left(const CellIndex& c) const;
    Point cell_center(const CellIndex& c) const;
    CellIndex cell_containing(Point p) const;
};

/// A lattice region cut out of a domain, with the boundary point attached
/// to each boundary cell.
struct Discretization {
    Domain domain;
    MeshSpec mesh;
    RegionPtr region;
    /// Parallel to region->boundary().
    std::vector<BoundaryPoint> boundary_points;
};

/// Cells whose four closed corners lie in the domain, restricted to the
/// Von Neumann component of the cell nearest the centroid (or `seed_cell`).
Discretization discretize(const Domain& domain, const MeshSpec& mesh,
                          std::optional<CellIndex> seed_cell = std::nullopt);

BoundaryValues sample_boundary(const Discretization& disc, const BoundaryTrace& trace);

/// Piecewise-constant lattice solution on a continuous domain.
struct ContinuumSolution {
    Discretization disc;
    ScalarField field;
    SolveReport report;

    /// Value of the region cell containing `p`; throws QueryOutsideRegion.
    double evaluate(Point p) const;
};

ContinuumSolution solve_continuum(const Domain& domain, const BoundaryTrace& trace,
                                  const MeshSpec& mesh, const SolverConfig& solver);

struct HarmonicMeasureResult {
    CellIndex start;
    std::vector<std::uint64_t> counts;
    std::vector<double> fractions;
    std::uint64_t completed = 0;
    std::uint64_t truncated = 0;
    WalkEnsembleResult ensemble;
};

/// Fraction of lattice walks from the cell containing `point` whose exit
/// cell maps into each arc. Disk domains only.
HarmonicMeasureResult harmonic_measure(const Domain& domain, const std::vector<Arc>& arcs,
                                       Point point, const MeshSpec& mesh,
                                       const WalkConfig& config);

/// sum_j c_j * (measured harmonic measure of arc j), one ensemble for all arcs.
double arc_combination_value(const Domain& domain, const trace::ArcCombination& combination,
                             Point point, const MeshSpec& mesh, const WalkConfig& config);

} // namespace harmonic
