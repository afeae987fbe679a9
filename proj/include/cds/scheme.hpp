#pragma once

#include "cds/random.hpp"
#include "cds/types.hpp"

#include <chrono>
#include <optional>
#include <span>
#include <utility>

namespace cds {

/// Default tolerance on the number of images a login trace may cross:
/// (w + l) * (n + 1).
std::size_t max_trace_length(const GridSpec& grid, std::size_t n);

/// Uniformly random placement of exactly `grid.cell_count()` distinct ids,
/// row-major. Deterministic for a fixed seed.
Layout generate_layout(std::span<const ImageId> image_ids, const GridSpec& grid, Seed seed);

/// Ordered (head, tail) pair drawn without replacement from the cells that do
/// not hold one of the password's images.
std::pair<Cell, Cell> select_head_tail(const Layout& layout, const Password& password, Seed seed);

struct ChallengeConfig {
    std::optional<std::size_t> max_len_override;
    std::chrono::seconds ttl{120};
    DegradeParams degrade;
};

/// Layout, head and tail come from `seed`; the nonce always comes from the
/// system CSPRNG so two challenges never share one.
Challenge generate_challenge(const Password& password, std::span<const ImageId> catalog_ids,
                             const GridSpec& grid, const ChallengeConfig& config, Seed seed,
                             TimePoint now = Clock::now());

/// Maps a stylus polyline onto the sequence of cells it enters. Segments are
/// supersampled finely enough that no crossed cell is skipped.
CellTrace map_polyline_to_cells(const Polyline& polyline, const GridSpec& grid);

/// Cell-entry events, starting cell included; re-entering a cell counts again.
std::size_t trace_length(const CellTrace& trace) noexcept;

/// Non-empty, on-grid, no repeated consecutive cell, 8-adjacent steps.
bool is_continuous(const GridSpec& grid, const CellTrace& trace) noexcept;

/// True when `needle` occurs in `haystack` in order (not necessarily
/// contiguously). Greedy left-to-right scan.
bool is_ordered_subsequence(std::span<const ImageId> needle, std::span<const ImageId> haystack) noexcept;

/// Images crossed by the trace, in crossing order.
std::vector<ImageId> trace_images(const Layout& layout, const CellTrace& trace);

/// Checks run in a fixed order and the first failure is reported:
/// Discontinuous, EndpointMismatch, TooLong, OrderViolation.
Decision verify_trace(const Challenge& challenge, const Password& password, const CellTrace& trace);

/// Manhattan path from a to b: columns first, then rows.
CellTrace shortest_leg(const GridSpec& grid, Cell a, Cell b);

/// head -> p1 -> ... -> pn -> tail joined from shortest legs.
CellTrace synthesize_trace(const Challenge& challenge, const Password& password);

/// Adds random out-and-back or bridging detours through decoy cells. The
/// result stays accepted and grows by at most `detour_budget` entries.
CellTrace jitter_trace(const CellTrace& trace, const Challenge& challenge, const Password& password,
                       std::size_t detour_budget, Seed seed);

}  // namespace cds
