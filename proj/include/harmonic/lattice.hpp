#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "harmonic/error.hpp"
#include "harmonic/rational.hpp"

namespace harmonic {

inline constexpr int kMaxDimension = 3;

/// A unit lattice cell, labelled by the integer coordinates of its
/// lower-left vertex. Unused trailing coordinates are kept at zero so the
/// defaulted ordering is lexicographic on the used ones.
struct CellIndex {
    std::array<std::int32_t, kMaxDimension> coords{};
    int dim = 0;

    CellIndex() = default;
    explicit CellIndex(std::int32_t i) : coords{i, 0, 0}, dim(1) {}
    CellIndex(std::int32_t i, std::int32_t j) : coords{i, j, 0}, dim(2) {}
    CellIndex(std::int32_t i, std::int32_t j, std::int32_t k) : coords{i, j, k}, dim(3) {}

    static CellIndex from_coords(std::span<const std::int64_t> c);

    std::int32_t operator[](std::size_t axis) const { return coords[axis]; }

    CellIndex operator+(const CellIndex& offset) const;

    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
    friend bool operator==(const CellIndex&, const CellIndex&) = default;

    /// Coordinates joined by `sep`, e.g. "3;-1".
    std::string to_string(char sep) const;
};

struct CellIndexHash {
    std::size_t operator()(const CellIndex& c) const noexcept;
};

enum class StencilKind { VonNeumann, Moore };

/// Neighbour offsets and exact averaging weights of the mean-value operator.
/// The centre cell is never part of the average.
class Stencil {
public:
    static Stencil von_neumann(int dim);
    static Stencil moore(int dim);

    StencilKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    std::size_t size() const { return offsets_.size(); }
    const std::vector<CellIndex>& offsets() const { return offsets_; }
    const std::vector<Rational>& weights() const { return weights_; }
    /// Weights converted once to double, same order as offsets().
    const std::vector<double>& weights_double() const { return weights_double_; }

    /// All stencils built here have uniform weights; this is that weight.
    double uniform_weight() const { return weights_double_.front(); }

    std::string name() const;

private:
    Stencil(StencilKind kind, int dim, std::vector<CellIndex> offsets);

    StencilKind kind_;
    int dim_;
    std::vector<CellIndex> offsets_;
    std::vector<Rational> weights_;
    std::vector<double> weights_double_;
};

/// Stencil-closed set of interior cells plus the boundary cells around it.
///
/// Cells are numbered once at construction: interior cells occupy indices
/// [0, interior_size()) in lexicographic order, boundary cells follow, also
/// lexicographic. Fields store their values in that same order.
class Region {
public:
    int dimension() const { return stencil_.dimension(); }
    const Stencil& stencil() const { return stencil_; }

    const std::vector<CellIndex>& interior() const { return interior_; }
    const std::vector<CellIndex>& boundary() const { return boundary_; }
    /// Input cells dropped because they were not connected to the seed.
    const std::vector<CellIndex>& discarded() const { return discarded_; }

    std::size_t interior_size() const { return interior_.size(); }
    std::size_t boundary_size() const { return boundary_.size(); }
    std::size_t cell_count() const { return interior_.size() + boundary_.size(); }

    /// Cell with global index `idx` (interior first, then boundary).
    const CellIndex& cell(std::size_t idx) const;
    std::optional<std::size_t> index_of(const CellIndex& c) const;
    bool is_interior_index(std::size_t idx) const { return idx < interior_.size(); }
    bool contains(const CellIndex& c) const { return index_of(c).has_value(); }
    bool is_interior(const CellIndex& c) const;

    /// Global indices of the stencil neighbours of interior cell `i`, in
    /// stencil offset order.
    std::span<const std::uint32_t> neighbors(std::size_t i) const
    {
        const auto k = stencil_.size();
        return {neighbors_.data() + i * k, k};
    }

    friend bool operator==(const Region& a, const Region& b);

    friend std::shared_ptr<const Region> build_region(std::span<const CellIndex> cells,
                                                      const Stencil& stencil,
                                                      std::optional<CellIndex> seed_cell);

private:
    explicit Region(Stencil stencil) : stencil_(std::move(stencil)) {}

    Stencil stencil_;
    std::vector<CellIndex> interior_;
    std::vector<CellIndex> boundary_;
    std::vector<CellIndex> discarded_;
    std::unordered_map<CellIndex, std::uint32_t, CellIndexHash> index_;
    std::vector<std::uint32_t> neighbors_;
};

using RegionPtr = std::shared_ptr<const Region>;

/// Builds the region whose interior is the stencil-connected component of
/// `cells` containing `seed_cell` (default: the lexicographically smallest
/// cell). Other components are reported through Region::discarded().
RegionPtr build_region(std::span<const CellIndex> cells, const Stencil& stencil,
                       std::optional<CellIndex> seed_cell = std::nullopt);

/// Prescribed values on the boundary cells of a region, boundary order.
class BoundaryValues {
public:
    BoundaryValues(RegionPtr region, std::vector<double> values);

    static BoundaryValues constant(RegionPtr region, double value);
    /// Domain of `values` must equal the boundary set exactly.
    static BoundaryValues from_map(RegionPtr region, const std::map<CellIndex, double>& values);
    static BoundaryValues from_function(RegionPtr region,
                                        const std::function<double(const CellIndex&)>& f);

    const RegionPtr& region() const { return region_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t boundary_idx) const { return values_[boundary_idx]; }
    double at(const CellIndex& c) const;
    /// max |value|, 0 for an empty boundary.
    double max_abs() const;

private:
    RegionPtr region_;
    std::vector<double> values_;
};

/// One finite real value per cell of interior and boundary, in the region's
/// global index order.
class ScalarField {
public:
    ScalarField(RegionPtr region, std::vector<double> values);

    /// Boundary from `boundary`, every interior cell set to `interior_value`.
    static ScalarField from_boundary(const BoundaryValues& boundary, double interior_value = 0.0);
    static ScalarField from_function(RegionPtr region,
                                     const std::function<double(const CellIndex&)>& f);

    const RegionPtr& region() const { return region_; }
    const Region& region_ref() const { return *region_; }
    std::span<const double> values() const { return values_; }
    std::span<double> mutable_values() { return values_; }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double at(const CellIndex& c) const;

    BoundaryValues boundary_values() const;

private:
    RegionPtr region_;
    std::vector<double> values_;
};

struct ResidualReport {
    /// Residual per interior cell, interior order.
    std::vector<double> residual;
    double sup_norm = 0.0;
};

/// residual(P) = f(P) - sum_k w_k f(P + offset_k) over interior cells.
ResidualReport mean_value_residual(const ScalarField& field);
/// Sup-norm only, without materialising the per-cell vector.
double mean_value_residual_sup(const ScalarField& field);

struct MaximumPrincipleReport {
    bool passes = false;
    double interior_max = 0.0;
    double interior_min = 0.0;
    double boundary_max = 0.0;
    double boundary_min = 0.0;
    std::optional<CellIndex> witness;
};

/// Passes iff interior values lie within [boundary_min - slack,
/// boundary_max + slack]. `slack` defaults to an exact comparison; callers
/// checking floating-point solver output pass a rounding allowance.
MaximumPrincipleReport check_maximum_principle(const ScalarField& field, double slack = 0.0);

} // namespace harmonic
