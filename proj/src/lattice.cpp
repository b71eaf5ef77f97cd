#include "harmonic/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <unordered_set>

namespace harmonic {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyCellSet: return "EmptyCellSet";
    case ErrorCode::SeedNotInCells: return "SeedNotInCells";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::NoInteriorCell: return "NoInteriorCell";
    case ErrorCode::QueryOutsideRegion: return "QueryOutsideRegion";
    case ErrorCode::PointOutside: return "PointOutside";
    case ErrorCode::CellNotInterior: return "CellNotInterior";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

//---------------------------------------------------------------------------//
// CellIndex
//---------------------------------------------------------------------------//

CellIndex CellIndex::from_coords(std::span<const std::int64_t> c)
{
    if (c.empty() || c.size() > kMaxDimension) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cell must have 1 to 3 coordinates, got " + std::to_string(c.size()));
    }
    CellIndex out;
    out.dim = static_cast<int>(c.size());
    for (std::size_t a = 0; a < c.size(); ++a) {
        if (c[a] < std::numeric_limits<std::int32_t>::min() / 2
            || c[a] > std::numeric_limits<std::int32_t>::max() / 2) {
            throw Error(ErrorCode::OutOfRange, "cell coordinate out of range");
        }
        out.coords[a] = static_cast<std::int32_t>(c[a]);
    }
    return out;
}

CellIndex CellIndex::operator+(const CellIndex& offset) const
{
    CellIndex out = *this;
    for (int a = 0; a < dim; ++a) {
        out.coords[a] += offset.coords[a];
    }
    return out;
}

std::string CellIndex::to_string(char sep) const
{
    std::string s;
    for (int a = 0; a < dim; ++a) {
        if (a > 0) {
            s += sep;
        }
        s += std::to_string(coords[a]);
    }
    return s;
}

std::size_t CellIndexHash::operator()(const CellIndex& c) const noexcept
{
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : c.coords) {
        h ^= static_cast<std::uint32_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(c.dim));
}

//---------------------------------------------------------------------------//
// Stencil
//---------------------------------------------------------------------------//

namespace {

void check_dimension(int dim)
{
    if (dim < 1 || dim > kMaxDimension) {
        throw Error(ErrorCode::DimensionMismatch,
                    "stencil dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
}

CellIndex zero_cell(int dim)
{
    CellIndex c;
    c.dim = dim;
    return c;
}

} // namespace

Stencil::Stencil(StencilKind kind, int dim, std::vector<CellIndex> offsets)
    : kind_(kind), dim_(dim), offsets_(std::move(offsets))
{
    const Rational w(1, static_cast<std::int64_t>(offsets_.size()));
    weights_.assign(offsets_.size(), w);
    weights_double_.assign(offsets_.size(), w.to_double());
}

Stencil Stencil::von_neumann(int dim)
{
    check_dimension(dim);
    std::vector<CellIndex> offsets;
    for (int a = 0; a < dim; ++a) {
        for (int s : {-1, 1}) {
            auto c = zero_cell(dim);
            c.coords[a] = s;
            offsets.push_back(c);
        }
    }
    return Stencil(StencilKind::VonNeumann, dim, std::move(offsets));
}

Stencil Stencil::moore(int dim)
{
    check_dimension(dim);
    std::vector<CellIndex> offsets;
    int total = 1;
    for (int a = 0; a < dim; ++a) {
        total *= 3;
    }
    for (int code = 0; code < total; ++code) {
        auto c = zero_cell(dim);
        int rest = code;
        bool zero = true;
        for (int a = 0; a < dim; ++a) {
            c.coords[a] = rest % 3 - 1;
            rest /= 3;
            zero = zero && c.coords[a] == 0;
        }
        if (!zero) {
            offsets.push_back(c);
        }
    }
    std::sort(offsets.begin(), offsets.end());
    return Stencil(StencilKind::Moore, dim, std::move(offsets));
}

std::string Stencil::name() const
{
    return kind_ == StencilKind::VonNeumann ? "von_neumann" : "moore";
}

//---------------------------------------------------------------------------//
// Region
//---------------------------------------------------------------------------//

const CellIndex& Region::cell(std::size_t idx) const
{
    return idx < interior_.size() ? interior_[idx] : boundary_[idx - interior_.size()];
}

std::optional<std::size_t> Region::index_of(const CellIndex& c) const
{
    auto it = index_.find(c);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool Region::is_interior(const CellIndex& c) const
{
    auto idx = index_of(c);
    return idx && *idx < interior_.size();
}

bool operator==(const Region& a, const Region& b)
{
    return a.stencil_.kind() == b.stencil_.kind() && a.dimension() == b.dimension()
           && a.interior_ == b.interior_ && a.boundary_ == b.boundary_;
}

RegionPtr build_region(std::span<const CellIndex> cells, const Stencil& stencil,
                       std::optional<CellIndex> seed_cell)
{
    if (cells.empty()) {
        throw Error(ErrorCode::EmptyCellSet, "build_region: empty cell set");
    }
    const int dim = stencil.dimension();
    for (const auto& c : cells) {
        if (c.dim != dim) {
            throw Error(ErrorCode::DimensionMismatch,
                        "build_region: cell " + c.to_string(',') + " has dimension "
                            + std::to_string(c.dim) + ", stencil has " + std::to_string(dim));
        }
    }
    std::unordered_set<CellIndex, CellIndexHash> candidates(cells.begin(), cells.end());

    CellIndex seed;
    if (seed_cell) {
        if (seed_cell->dim != dim || !candidates.contains(*seed_cell)) {
            throw Error(ErrorCode::SeedNotInCells,
                        "build_region: seed cell " + seed_cell->to_string(',')
                            + " is not among the input cells");
        }
        seed = *seed_cell;
    } else {
        seed = *std::min_element(cells.begin(), cells.end());
    }

    // Breadth-first search over stencil adjacency restricted to the input.
    std::unordered_set<CellIndex, CellIndexHash> interior_set{seed};
    std::deque<CellIndex> queue{seed};
    while (!queue.empty()) {
        auto c = queue.front();
        queue.pop_front();
        for (const auto& off : stencil.offsets()) {
            auto n = c + off;
            if (candidates.contains(n) && interior_set.insert(n).second) {
                queue.push_back(n);
            }
        }
    }

    std::set<CellIndex> boundary_set;
    for (const auto& c : interior_set) {
        for (const auto& off : stencil.offsets()) {
            auto n = c + off;
            if (!interior_set.contains(n)) {
                boundary_set.insert(n);
            }
        }
    }

    std::shared_ptr<Region> region(new Region(stencil));
    region->interior_.assign(interior_set.begin(), interior_set.end());
    std::sort(region->interior_.begin(), region->interior_.end());
    region->boundary_.assign(boundary_set.begin(), boundary_set.end());

    std::set<CellIndex> discarded;
    for (const auto& c : candidates) {
        if (!interior_set.contains(c)) {
            discarded.insert(c);
        }
    }
    region->discarded_.assign(discarded.begin(), discarded.end());

    const auto n_cells = region->cell_count();
    if (n_cells >= std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::TooLarge, "build_region: too many cells");
    }
    region->index_.reserve(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        region->index_.emplace(region->cell(i), static_cast<std::uint32_t>(i));
    }

    const auto k = stencil.size();
    region->neighbors_.resize(region->interior_.size() * k);
    for (std::size_t i = 0; i < region->interior_.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            auto n = region->interior_[i] + stencil.offsets()[j];
            region->neighbors_[i * k + j] = region->index_.at(n);
        }
    }
    return region;
}

//---------------------------------------------------------------------------//
// BoundaryValues / ScalarField
//---------------------------------------------------------------------------//

namespace {

void require_region(const RegionPtr& region)
{
    if (!region) {
        throw Error(ErrorCode::InvalidArgument, "null region");
    }
}

void require_finite(std::span<const double> values, const char* what)
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + ": non-finite value");
        }
    }
}

} // namespace

BoundaryValues::BoundaryValues(RegionPtr region, std::vector<double> values)
    : region_(std::move(region)), values_(std::move(values))
{
    require_region(region_);
    if (values_.size() != region_->boundary_size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "boundary values: expected " + std::to_string(region_->boundary_size())
                        + " values, got " + std::to_string(values_.size()));
    }
    require_finite(values_, "boundary values");
}

BoundaryValues BoundaryValues::constant(RegionPtr region, double value)
{
    require_region(region);
    auto n = region->boundary_size();
    return BoundaryValues(std::move(region), std::vector<double>(n, value));
}

BoundaryValues BoundaryValues::from_map(RegionPtr region, const std::map<CellIndex, double>& values)
{
    require_region(region);
    std::vector<double> out(region->boundary_size());
    if (values.size() != out.size()) {
        throw Error(ErrorCode::MissingCell,
                    "boundary values: map has " + std::to_string(values.size())
                        + " entries, region boundary has " + std::to_string(out.size()));
    }
    for (const auto& [cell, v] : values) {
        auto idx = region->index_of(cell);
        if (!idx || region->is_interior_index(*idx)) {
            throw Error(ErrorCode::MissingCell,
                        "boundary values: " + cell.to_string(',') + " is not a boundary cell");
        }
        out[*idx - region->interior_size()] = v;
    }
    return BoundaryValues(std::move(region), std::move(out));
}

BoundaryValues BoundaryValues::from_function(RegionPtr region,
                                             const std::function<double(const CellIndex&)>& f)
{
    require_region(region);
    std::vector<double> out;
    out.reserve(region->boundary_size());
    for (const auto& c : region->boundary()) {
        out.push_back(f(c));
    }
    return BoundaryValues(std::move(region), std::move(out));
}

double BoundaryValues::at(const CellIndex& c) const
{
    auto idx = region_->index_of(c);
    if (!idx || region_->is_interior_index(*idx)) {
        throw Error(ErrorCode::MissingCell, c.to_string(',') + " is not a boundary cell");
    }
    return values_[*idx - region_->interior_size()];
}

double BoundaryValues::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

ScalarField::ScalarField(RegionPtr region, std::vector<double> values)
    : region_(std::move(region)), values_(std::move(values))
{
    require_region(region_);
    if (values_.size() != region_->cell_count()) {
        throw Error(ErrorCode::InvalidArgument,
                    "field: expected " + std::to_string(region_->cell_count()) + " values, got "
                        + std::to_string(values_.size()));
    }
    require_finite(values_, "field");
}

ScalarField ScalarField::from_boundary(const BoundaryValues& boundary, double interior_value)
{
    const auto& region = boundary.region();
    std::vector<double> v(region->cell_count(), interior_value);
    std::copy(boundary.values().begin(), boundary.values().end(),
              v.begin() + static_cast<std::ptrdiff_t>(region->interior_size()));
    return ScalarField(region, std::move(v));
}

ScalarField ScalarField::from_function(RegionPtr region,
                                       const std::function<double(const CellIndex&)>& f)
{
    require_region(region);
    std::vector<double> v;
    v.reserve(region->cell_count());
    for (std::size_t i = 0; i < region->cell_count(); ++i) {
        v.push_back(f(region->cell(i)));
    }
    return ScalarField(std::move(region), std::move(v));
}

double ScalarField::at(const CellIndex& c) const
{
    auto idx = region_->index_of(c);
    if (!idx) {
        throw Error(ErrorCode::MissingCell, c.to_string(',') + " is not a cell of the region");
    }
    return values_[*idx];
}

BoundaryValues ScalarField::boundary_values() const
{
    auto first = values_.begin() + static_cast<std::ptrdiff_t>(region_->interior_size());
    return BoundaryValues(region_, std::vector<double>(first, values_.end()));
}

//---------------------------------------------------------------------------//
// Verification
//---------------------------------------------------------------------------//

namespace {

inline double stencil_average(const Region& region, std::span<const double> v, std::size_t i)
{
    const auto& w = region.stencil().weights_double();
    double sum = 0.0;
    auto nb = region.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
        sum += w[k] * v[nb[k]];
    }
    return sum;
}

} // namespace

ResidualReport mean_value_residual(const ScalarField& field)
{
    const auto& region = field.region_ref();
    ResidualReport out;
    out.residual.resize(region.interior_size());
    for (std::size_t i = 0; i < region.interior_size(); ++i) {
        double r = field[i] - stencil_average(region, field.values(), i);
        out.residual[i] = r;
        out.sup_norm = std::max(out.sup_norm, std::abs(r));
    }
    return out;
}

double mean_value_residual_sup(const ScalarField& field)
{
    const auto& region = field.region_ref();
    double sup = 0.0;
    for (std::size_t i = 0; i < region.interior_size(); ++i) {
        sup = std::max(sup, std::abs(field[i] - stencil_average(region, field.values(), i)));
    }
    return sup;
}

MaximumPrincipleReport check_maximum_principle(const ScalarField& field, double slack)
{
    const auto& region = field.region_ref();
    if (region.boundary_size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "maximum principle: region has no boundary");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    MaximumPrincipleReport rep;
    rep.boundary_max = -inf;
    rep.boundary_min = inf;
    for (std::size_t b = region.interior_size(); b < region.cell_count(); ++b) {
        rep.boundary_max = std::max(rep.boundary_max, field[b]);
        rep.boundary_min = std::min(rep.boundary_min, field[b]);
    }
    rep.interior_max = -inf;
    rep.interior_min = inf;
    double worst = 0.0;
    for (std::size_t i = 0; i < region.interior_size(); ++i) {
        double v = field[i];
        rep.interior_max = std::max(rep.interior_max, v);
        rep.interior_min = std::min(rep.interior_min, v);
        double excess = std::max(v - (rep.boundary_max + slack), (rep.boundary_min - slack) - v);
        if (excess > worst) {
            worst = excess;
            rep.witness = region.interior()[i];
        }
    }
    rep.passes = !rep.witness.has_value();
    return rep;
}

} // namespace harmonic
