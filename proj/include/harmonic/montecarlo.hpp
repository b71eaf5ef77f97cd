#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "harmonic/lattice.hpp"
#include "harmonic/rational.hpp"

namespace harmonic {

struct WalkConfig {
    std::uint64_t walks = 1;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 100'000'000;
    /// Worker threads. Results are bit-identical for every value.
    int threads = 1;

    void validate() const;
};

/// Counter-based random stream for one walk. The state is derived from
/// (seed, walk_index) by a bijective 64-bit mixer, so streams never depend on
/// scheduling. Output is the SplitMix64 sequence.
class WalkStream {
public:
    WalkStream(std::uint64_t seed, std::uint64_t walk_index);

    std::uint64_t next();

    /// Uniform integer in [0, n) by rejection on ceil(log2 n)-bit chunks.
    std::uint32_t uniform_below(std::uint32_t n);

    /// The finalizer used for stream derivation.
    static std::uint64_t mix(std::uint64_t x);

private:
    std::uint64_t state_;
    std::uint64_t bits_ = 0;
    int bits_left_ = 0;
};

/// Outcome of one walk: the boundary cell reached, or nothing if truncated.
struct WalkOutcome {
    std::optional<CellIndex> hit;
    std::uint64_t steps = 0;
};

struct WalkEnsembleResult {
    CellIndex start;
    std::uint64_t seed = 0;
    std::uint64_t walks = 0;
    /// Hit count per boundary cell, in the region's boundary order.
    std::vector<std::uint64_t> hits;
    std::uint64_t completed = 0;
    std::uint64_t truncated = 0;
    /// Populated by solve_monte_carlo only.
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Simple random walk from `start` until it first leaves the interior.
/// Requires a Von Neumann stencil and `start` in the interior.
WalkOutcome simulate_walk(const Region& region, const CellIndex& start, WalkStream& stream,
                          std::uint64_t max_steps = 100'000'000);

/// Exit-cell counts over config.walks independent walks from `start`.
/// Truncated walks are counted separately, never folded into `hits`.
WalkEnsembleResult hitting_distribution(const RegionPtr& region, const CellIndex& start,
                                        const WalkConfig& config);

/// Expected boundary value at the exit cell, plus its standard error.
WalkEnsembleResult solve_monte_carlo(const BoundaryValues& boundary, const CellIndex& start,
                                     const WalkConfig& config);

/// Fills estimate and std_error of `result` from its counts, summing in
/// boundary order.
void evaluate_ensemble(WalkEnsembleResult& result, const BoundaryValues& boundary);

/// Probability k/K that a fair +-1 walk from k reaches K before 0.
Rational gambler_ruin_exact(std::int64_t start_capital, std::int64_t target);

} // namespace harmonic
