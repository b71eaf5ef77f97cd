#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "harmonic/continuum.hpp"
#include "harmonic/lattice.hpp"
#include "harmonic/montecarlo.hpp"
#include "harmonic/solvers.hpp"

namespace harmonic::io {

/// Cell from "i", "i,j" or "i;j;k" style text.
CellIndex parse_cell(const std::string& text, char sep);
Point parse_point(const std::string& text);

/// Region JSON:
///   {"dimension": d, "stencil": "von_neumann"|"moore",
///    "interior": [[i,j],...], "boundary": {"i,j": value, ...}}
/// The boundary map carries the boundary values.
BoundaryValues read_region_json(const std::string& text);
std::string write_region_json(const BoundaryValues& boundary);

/// Field CSV: header `cell,value`, cells as `i;j`, rows in lexicographic
/// cell order. Values use shortest round-trip formatting.
std::string write_field_csv(const ScalarField& field);
ScalarField read_field_csv(const std::string& text, const RegionPtr& region);

/// P2 greymap over the bounding box of a 2D region, top row = largest j.
/// Values map affinely to 0..255 (min -> 0, max -> 255); a constant field
/// maps to 128. Pixels outside the region are 0.
std::string write_field_pgm(const ScalarField& field);

std::string solve_report_json(const SolveReport& report);
/// {start, seed, walks, truncated, completed, estimate, std_error, hits}
std::string ensemble_json(const WalkEnsembleResult& result, const Region& region);
std::string harmonic_measure_json(const HarmonicMeasureResult& result,
                                  const std::vector<Arc>& arcs, std::uint64_t seed,
                                  std::uint64_t walks, double tau, Point point);

Domain read_domain_json(const std::string& text);
BoundaryTrace read_trace_json(const std::string& text);
std::vector<Arc> read_arcs_json(const std::string& text);

/// Shortest decimal string that round-trips to `v`.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace harmonic::io
