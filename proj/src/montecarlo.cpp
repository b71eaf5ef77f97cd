#include "harmonic/montecarlo.hpp"

#include <bit>
#include <cmath>

namespace harmonic {

void WalkConfig::validate() const
{
    if (walks < 1) {
        throw Error(ErrorCode::InvalidArgument, "walks must be at least 1");
    }
    if (max_steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_steps must be at least 1");
    }
    if (threads < 1) {
        throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
    }
}

//---------------------------------------------------------------------------//
// WalkStream
//---------------------------------------------------------------------------//

std::uint64_t WalkStream::mix(std::uint64_t x)
{
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

WalkStream::WalkStream(std::uint64_t seed, std::uint64_t walk_index)
    : state_(mix(mix(seed) ^ (walk_index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)))
{
}

std::uint64_t WalkStream::next()
{
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
}

std::uint32_t WalkStream::uniform_below(std::uint32_t n)
{
    if (n <= 1) {
        return 0;
    }
    const int width = std::bit_width(n - 1);
    const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
    for (;;) {
        if (bits_left_ < width) {
            bits_ = next();
            bits_left_ = 64;
        }
        auto v = static_cast<std::uint32_t>(bits_ & mask);
        bits_ >>= width;
        bits_left_ -= width;
        if (v < n) {
            return v;
        }
    }
}

//---------------------------------------------------------------------------//
// Walks
//---------------------------------------------------------------------------//

namespace {

std::size_t require_walkable(const Region& region, const CellIndex& start)
{
    if (region.stencil().kind() != StencilKind::VonNeumann) {
        throw Error(ErrorCode::InvalidArgument, "random walks require a Von Neumann stencil");
    }
    auto idx = region.index_of(start);
    if (!idx || !region.is_interior_index(*idx)) {
        throw Error(ErrorCode::CellNotInterior,
                    "walk start " + start.to_string(',') + " is not an interior cell");
    }
    return *idx;
}

/// Returns the global index of the exit cell, or nullopt when truncated.
inline std::optional<std::uint32_t> walk_from(const Region& region, std::uint32_t idx,
                                              WalkStream& stream, std::uint64_t max_steps,
                                              std::uint64_t& steps)
{
    const auto n_int = region.interior_size();
    const auto k = static_cast<std::uint32_t>(region.stencil().size());
    steps = 0;
    while (idx < n_int) {
        if (steps == max_steps) {
            return std::nullopt;
        }
        idx = region.neighbors(idx)[stream.uniform_below(k)];
        ++steps;
    }
    return idx;
}

} // namespace

WalkOutcome simulate_walk(const Region& region, const CellIndex& start, WalkStream& stream,
                          std::uint64_t max_steps)
{
    auto idx = require_walkable(region, start);
    WalkOutcome out;
    auto hit = walk_from(region, static_cast<std::uint32_t>(idx), stream, max_steps, out.steps);
    if (hit) {
        out.hit = region.cell(*hit);
    }
    return out;
}

WalkEnsembleResult hitting_distribution(const RegionPtr& region_ptr, const CellIndex& start,
                                        const WalkConfig& config)
{
    config.validate();
    const Region& region = *region_ptr;
    const auto start_idx = static_cast<std::uint32_t>(require_walkable(region, start));
    const auto n_int = region.interior_size();
    const auto n_bd = region.boundary_size();
    const auto walks = static_cast<std::int64_t>(config.walks);

    WalkEnsembleResult result;
    result.start = start;
    result.seed = config.seed;
    result.walks = config.walks;
    result.hits.assign(n_bd, 0);

    // Integer counts per thread, merged afterwards: the sum is exact, so
    // the result cannot depend on the schedule.
#pragma omp parallel num_threads(config.threads) if (config.threads > 1)
    {
        std::vector<std::uint64_t> local(n_bd, 0);
        std::uint64_t local_truncated = 0;
#pragma omp for schedule(static)
        for (std::int64_t w = 0; w < walks; ++w) {
            WalkStream stream(config.seed, static_cast<std::uint64_t>(w));
            std::uint64_t steps = 0;
            auto hit = walk_from(region, start_idx, stream, config.max_steps, steps);
            if (hit) {
                ++local[*hit - n_int];
            } else {
                ++local_truncated;
            }
        }
#pragma omp critical
        {
            for (std::size_t b = 0; b < n_bd; ++b) {
                result.hits[b] += local[b];
            }
            result.truncated += local_truncated;
        }
    }
    result.completed = config.walks - result.truncated;
    return result;
}

void evaluate_ensemble(WalkEnsembleResult& result, const BoundaryValues& boundary)
{
    if (result.hits.size() != boundary.values().size()) {
        throw Error(ErrorCode::InvalidArgument, "ensemble and boundary values disagree in size");
    }
    result.estimate = 0.0;
    result.std_error = 0.0;
    if (result.completed == 0) {
        return;
    }
    const double n = static_cast<double>(result.completed);
    double sum = 0.0;
    for (std::size_t b = 0; b < result.hits.size(); ++b) {
        sum += boundary[b] * static_cast<double>(result.hits[b]);
    }
    result.estimate = sum / n;
    if (result.completed < 2) {
        return;
    }
    double ss = 0.0;
    for (std::size_t b = 0; b < result.hits.size(); ++b) {
        double d = boundary[b] - result.estimate;
        ss += static_cast<double>(result.hits[b]) * d * d;
    }
    result.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

WalkEnsembleResult solve_monte_carlo(const BoundaryValues& boundary, const CellIndex& start,
                                     const WalkConfig& config)
{
    auto result = hitting_distribution(boundary.region(), start, config);
    evaluate_ensemble(result, boundary);
    return result;
}

Rational gambler_ruin_exact(std::int64_t start_capital, std::int64_t target)
{
    if (target < 1) {
        throw Error(ErrorCode::OutOfRange, "gambler's ruin: target must be at least 1");
    }
    if (start_capital < 0 || start_capital > target) {
        throw Error(ErrorCode::OutOfRange, "gambler's ruin: start capital must lie in [0, target]");
    }
    return {start_capital, target};
}

} // namespace harmonic
