#include "cds/scheme.hpp"

#include "cds/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace cds {

GridSpec::GridSpec(int cols, int rows) : cols_(cols), rows_(rows) {
    if (cols < 2 || rows < 2) {
        throw Error(Errc::InvalidGrid, "grid needs at least 2 columns and 2 rows, got " +
                                           std::to_string(cols) + "x" + std::to_string(rows));
    }
}

bool GridSpec::adjacent8(Cell a, Cell b) const noexcept {
    if (!contains(a) || !contains(b) || a == b) {
        return false;
    }
    return std::abs(row_of(a) - row_of(b)) <= 1 && std::abs(col_of(a) - col_of(b)) <= 1;
}

void validate_password(const Password& password, const GridSpec& grid) {
    const std::size_t n = password.size();
    if (n < 1 || n + 2 > grid.cell_count()) {
        throw Error(Errc::InvalidPassword, "password length " + std::to_string(n) +
                                               " outside 1.." + std::to_string(grid.cell_count() - 2));
    }
    std::set<ImageId> seen(password.image_ids.begin(), password.image_ids.end());
    if (seen.size() != n) {
        throw Error(Errc::InvalidPassword, "pass-images must be distinct");
    }
}

std::optional<Cell> Layout::cell_of(ImageId image) const noexcept {
    auto it = std::find(cell_to_image.begin(), cell_to_image.end(), image);
    if (it == cell_to_image.end()) {
        return std::nullopt;
    }
    return static_cast<Cell>(it - cell_to_image.begin());
}

void validate_degrade(const DegradeParams& params) {
    if (!(params.alpha > 0.0 && params.alpha <= 1.0) || !(params.beta >= 0.0 && params.beta <= 255.0)) {
        throw Error(Errc::InvalidConfig, "degrade params need 0 < alpha <= 1 and 0 <= beta <= 255");
    }
}

std::string_view to_string(Reason reason) noexcept {
    switch (reason) {
        case Reason::Ok: return "Ok";
        case Reason::Discontinuous: return "Discontinuous";
        case Reason::EndpointMismatch: return "EndpointMismatch";
        case Reason::TooLong: return "TooLong";
        case Reason::OrderViolation: return "OrderViolation";
    }
    return "Unknown";
}

std::size_t max_trace_length(const GridSpec& grid, std::size_t n) {
    return static_cast<std::size_t>(grid.cols() + grid.rows()) * (n + 1);
}

Layout generate_layout(std::span<const ImageId> image_ids, const GridSpec& grid, Seed seed) {
    if (image_ids.size() != grid.cell_count()) {
        throw Error(Errc::WrongImageCount, "layout needs " + std::to_string(grid.cell_count()) +
                                               " images, got " + std::to_string(image_ids.size()));
    }
    std::set<ImageId> seen(image_ids.begin(), image_ids.end());
    if (seen.size() != image_ids.size()) {
        throw Error(Errc::DuplicateImageId, "layout images must be distinct");
    }

    Layout layout{std::vector<ImageId>(image_ids.begin(), image_ids.end())};
    Rng rng(seed);
    auto& cells = layout.cell_to_image;
    // Fisher-Yates, highest index first.
    for (std::size_t i = cells.size(); i > 1; --i) {
        std::swap(cells[i - 1], cells[uniform_below(rng, i)]);
    }
    return layout;
}

std::pair<Cell, Cell> select_head_tail(const Layout& layout, const Password& password, Seed seed) {
    std::vector<Cell> decoys;
    for (Cell c = 0; c < layout.cell_to_image.size(); ++c) {
        const ImageId image = layout.cell_to_image[c];
        if (std::find(password.image_ids.begin(), password.image_ids.end(), image) ==
            password.image_ids.end()) {
            decoys.push_back(c);
        }
    }
    if (decoys.size() < 2) {
        throw Error(Errc::NoEligibleCells, "need two non-pass-image cells for head and tail, have " +
                                               std::to_string(decoys.size()));
    }
    Rng rng(seed);
    const auto head = uniform_below(rng, decoys.size());
    auto tail = uniform_below(rng, decoys.size() - 1);
    if (tail >= head) {
        ++tail;
    }
    return {decoys[head], decoys[tail]};
}

Challenge generate_challenge(const Password& password, std::span<const ImageId> catalog_ids,
                             const GridSpec& grid, const ChallengeConfig& config, Seed seed,
                             TimePoint now) {
    validate_password(password, grid);
    validate_degrade(config.degrade);

    Challenge challenge;
    challenge.nonce = random_nonce();
    challenge.grid = grid;
    challenge.layout = generate_layout(catalog_ids, grid, derive_seed(seed, 0));
    for (ImageId id : password.image_ids) {
        if (!challenge.layout.cell_of(id)) {
            throw Error(Errc::UnknownImageId,
                        "pass-image " + std::to_string(id.value) + " is not in the catalog");
        }
    }
    std::tie(challenge.head_cell, challenge.tail_cell) =
        select_head_tail(challenge.layout, password, derive_seed(seed, 1));
    challenge.max_len = config.max_len_override.value_or(max_trace_length(grid, password.size()));
    challenge.degrade = config.degrade;
    challenge.expires_at = now + config.ttl;
    return challenge;
}

namespace {

Cell cell_of_point(const GridSpec& grid, double x, double y) {
    const int col = std::min(static_cast<int>(std::floor(x * grid.cols())), grid.cols() - 1);
    const int row = std::min(static_cast<int>(std::floor(y * grid.rows())), grid.rows() - 1);
    return grid.cell_at(row, col);
}

void push_cell(CellTrace& trace, Cell cell) {
    if (trace.cells.empty() || trace.cells.back() != cell) {
        trace.cells.push_back(cell);
    }
}

}  // namespace

CellTrace map_polyline_to_cells(const Polyline& polyline, const GridSpec& grid) {
    if (polyline.points.empty()) {
        throw Error(Errc::EmptyPolyline, "polyline has no points");
    }
    // At most a quarter cell per sample, so consecutive samples never jump
    // more than one row or column.
    const double step = 0.25 * std::min(1.0 / grid.cols(), 1.0 / grid.rows());

    auto clamp_point = [](const Point& p) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(Errc::InvalidRange, "polyline coordinates must be finite");
        }
        return std::pair{std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)};
    };

    CellTrace trace;
    auto [px, py] = clamp_point(polyline.points.front());
    push_cell(trace, cell_of_point(grid, px, py));
    for (std::size_t i = 1; i < polyline.points.size(); ++i) {
        const auto [qx, qy] = clamp_point(polyline.points[i]);
        const double dist = std::hypot(qx - px, qy - py);
        const auto samples = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dist / step)));
        for (std::size_t s = 1; s <= samples; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(samples);
            push_cell(trace, cell_of_point(grid, px + (qx - px) * t, py + (qy - py) * t));
        }
        px = qx;
        py = qy;
    }
    return trace;
}

std::size_t trace_length(const CellTrace& trace) noexcept {
    return trace.cells.size();
}

bool is_continuous(const GridSpec& grid, const CellTrace& trace) noexcept {
    if (trace.cells.empty() || !grid.contains(trace.cells.front())) {
        return false;
    }
    for (std::size_t i = 1; i < trace.cells.size(); ++i) {
        if (!grid.adjacent8(trace.cells[i - 1], trace.cells[i])) {
            return false;
        }
    }
    return true;
}

bool is_ordered_subsequence(std::span<const ImageId> needle, std::span<const ImageId> haystack) noexcept {
    std::size_t matched = 0;
    for (ImageId image : haystack) {
        if (matched == needle.size()) {
            break;
        }
        if (image == needle[matched]) {
            ++matched;
        }
    }
    return matched == needle.size();
}

std::vector<ImageId> trace_images(const Layout& layout, const CellTrace& trace) {
    std::vector<ImageId> images;
    images.reserve(trace.cells.size());
    for (Cell c : trace.cells) {
        images.push_back(layout.image_at(c));
    }
    return images;
}

Decision verify_trace(const Challenge& challenge, const Password& password, const CellTrace& trace) {
    if (!is_continuous(challenge.grid, trace) ||
        challenge.layout.cell_to_image.size() != challenge.grid.cell_count()) {
        return Decision::reject(Reason::Discontinuous);
    }
    if (trace.cells.front() != challenge.head_cell || trace.cells.back() != challenge.tail_cell) {
        return Decision::reject(Reason::EndpointMismatch);
    }
    if (trace_length(trace) > challenge.max_len) {
        return Decision::reject(Reason::TooLong);
    }
    if (!is_ordered_subsequence(password.image_ids, trace_images(challenge.layout, trace))) {
        return Decision::reject(Reason::OrderViolation);
    }
    return Decision::accept();
}

CellTrace shortest_leg(const GridSpec& grid, Cell a, Cell b) {
    if (!grid.contains(a) || !grid.contains(b)) {
        throw Error(Errc::CellOutOfRange, "leg endpoint outside the grid");
    }
    int row = grid.row_of(a);
    int col = grid.col_of(a);
    const int to_row = grid.row_of(b);
    const int to_col = grid.col_of(b);

    CellTrace leg{{a}};
    while (col != to_col) {
        col += to_col > col ? 1 : -1;
        leg.cells.push_back(grid.cell_at(row, col));
    }
    while (row != to_row) {
        row += to_row > row ? 1 : -1;
        leg.cells.push_back(grid.cell_at(row, col));
    }
    return leg;
}

CellTrace synthesize_trace(const Challenge& challenge, const Password& password) {
    std::vector<Cell> waypoints;
    waypoints.reserve(password.size() + 1);
    for (ImageId id : password.image_ids) {
        const auto cell = challenge.layout.cell_of(id);
        if (!cell) {
            throw Error(Errc::UnknownImageId,
                        "pass-image " + std::to_string(id.value) + " is not in the layout");
        }
        waypoints.push_back(*cell);
    }
    waypoints.push_back(challenge.tail_cell);

    CellTrace trace{{challenge.head_cell}};
    for (Cell next : waypoints) {
        const CellTrace leg = shortest_leg(challenge.grid, trace.cells.back(), next);
        trace.cells.insert(trace.cells.end(), leg.cells.begin() + 1, leg.cells.end());
    }
    return trace;
}

CellTrace jitter_trace(const CellTrace& trace, const Challenge& challenge, const Password& password,
                       std::size_t detour_budget, Seed seed) {
    const GridSpec& grid = challenge.grid;
    std::vector<bool> is_decoy(grid.cell_count(), true);
    for (ImageId id : password.image_ids) {
        if (const auto cell = challenge.layout.cell_of(id)) {
            is_decoy[*cell] = false;
        }
    }

    auto decoy_neighbours = [&](Cell around) {
        std::vector<Cell> out;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const int r = grid.row_of(around) + dr;
                const int c = grid.col_of(around) + dc;
                if ((dr == 0 && dc == 0) || r < 0 || c < 0 || r >= grid.rows() || c >= grid.cols()) {
                    continue;
                }
                const Cell cell = grid.cell_at(r, c);
                if (is_decoy[cell]) {
                    out.push_back(cell);
                }
            }
        }
        return out;
    };

    CellTrace out = trace;
    const std::size_t room =
        challenge.max_len > trace.cells.size() ? challenge.max_len - trace.cells.size() : 0;
    std::size_t remaining = std::min(detour_budget, room);
    if (out.cells.size() < 2) {
        return out;
    }

    Rng rng(seed);
    for (std::size_t attempt = 0; remaining > 0 && attempt < 8 * detour_budget + 16; ++attempt) {
        const std::size_t i = uniform_below(rng, out.cells.size() - 1);
        const Cell here = out.cells[i];
        const Cell next = out.cells[i + 1];
        const bool bridge = remaining == 1 || uniform_below(rng, 2) == 0;
        if (bridge) {
            // here -> d -> next, where d touches both
            std::vector<Cell> options;
            for (Cell d : decoy_neighbours(here)) {
                if (d != next && grid.adjacent8(d, next)) {
                    options.push_back(d);
                }
            }
            if (options.empty()) {
                continue;
            }
            const Cell d = options[uniform_below(rng, options.size())];
            out.cells.insert(out.cells.begin() + static_cast<std::ptrdiff_t>(i) + 1, d);
            remaining -= 1;
        } else {
            // here -> d -> here -> next
            const auto options = decoy_neighbours(here);
            if (options.empty()) {
                continue;
            }
            const Cell d = options[uniform_below(rng, options.size())];
            out.cells.insert(out.cells.begin() + static_cast<std::ptrdiff_t>(i) + 1, {d, here});
            remaining -= 2;
        }
    }
    return out;
}

}  // namespace cds
