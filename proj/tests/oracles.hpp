#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library code paths they check.

#include "cds/types.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace cds::oracle {

/// 4-neighbour BFS distance on the grid graph.
inline int bfs_distance(const GridSpec& grid, Cell from, Cell to) {
    std::vector<int> dist(grid.cell_count(), -1);
    std::deque<Cell> queue{from};
    dist[from] = 0;
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        if (c == to) {
            return dist[c];
        }
        const int r = static_cast<int>(c) / grid.cols();
        const int col = static_cast<int>(c) % grid.cols();
        for (int k = 0; k < 4; ++k) {
            const int nr = r + dr[k];
            const int nc = col + dc[k];
            if (nr < 0 || nc < 0 || nr >= grid.rows() || nc >= grid.cols()) {
                continue;
            }
            const Cell n = static_cast<Cell>(nr * grid.cols() + nc);
            if (dist[n] < 0) {
                dist[n] = dist[c] + 1;
                queue.push_back(n);
            }
        }
    }
    return -1;
}

/// 8-neighbour BFS path from `from` to `to` that never enters `avoid`.
inline std::vector<Cell> bfs_path_avoiding(const GridSpec& grid, Cell from, Cell to, Cell avoid) {
    const auto n = grid.cell_count();
    std::vector<long> parent(n, -2);
    std::deque<Cell> queue{from};
    parent[from] = -1;
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        if (c == to) {
            break;
        }
        const int r = static_cast<int>(c) / grid.cols();
        const int col = static_cast<int>(c) % grid.cols();
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const int nr = r + dr;
                const int nc = col + dc;
                if ((dr == 0 && dc == 0) || nr < 0 || nc < 0 || nr >= grid.rows() || nc >= grid.cols()) {
                    continue;
                }
                const Cell next = static_cast<Cell>(nr * grid.cols() + nc);
                if (next != avoid && parent[next] == -2) {
                    parent[next] = static_cast<long>(c);
                    queue.push_back(next);
                }
            }
        }
    }
    std::vector<Cell> path;
    if (parent[to] == -2) {
        return path;
    }
    for (long c = static_cast<long>(to); c != -1; c = parent[static_cast<Cell>(c)]) {
        path.insert(path.begin(), static_cast<Cell>(c));
    }
    return path;
}

/// Subsequence test by dynamic programming over all prefix pairs.
template <typename Needle, typename Matches>
bool dp_subsequence(std::span<const Needle> needle, std::size_t hay_len, Matches matches) {
    // can[i][j]: first i needle items embed into first j hay items
    std::vector<std::vector<char>> can(needle.size() + 1, std::vector<char>(hay_len + 1, 0));
    for (std::size_t j = 0; j <= hay_len; ++j) {
        can[0][j] = 1;
    }
    for (std::size_t i = 1; i <= needle.size(); ++i) {
        for (std::size_t j = 1; j <= hay_len; ++j) {
            can[i][j] = can[i][j - 1] || (can[i - 1][j - 1] && matches(i - 1, j - 1));
        }
    }
    return can[needle.size()][hay_len] != 0;
}

inline bool brute_subsequence(std::span<const ImageId> needle, std::span<const ImageId> hay) {
    return dp_subsequence(needle, hay.size(), [&](std::size_t i, std::size_t j) { return needle[i] == hay[j]; });
}

inline bool brute_embeds(std::span<const ImageId> tuple, std::span<const std::optional<ImageId>> pattern) {
    return dp_subsequence(tuple, pattern.size(),
                          [&](std::size_t i, std::size_t j) { return !pattern[j] || *pattern[j] == tuple[i]; });
}

/// Straight transcription of the acceptance rule, check by check.
inline Reason brute_verify(const Challenge& ch, const Password& pw, const std::vector<Cell>& cells) {
    const int w = ch.grid.cols();
    const int l = ch.grid.rows();
    bool continuous = !cells.empty();
    for (std::size_t i = 0; continuous && i < cells.size(); ++i) {
        if (cells[i] >= static_cast<Cell>(w * l)) {
            continuous = false;
        } else if (i > 0) {
            const int r0 = static_cast<int>(cells[i - 1]) / w, c0 = static_cast<int>(cells[i - 1]) % w;
            const int r1 = static_cast<int>(cells[i]) / w, c1 = static_cast<int>(cells[i]) % w;
            const int d = std::max(std::abs(r0 - r1), std::abs(c0 - c1));
            continuous = d == 1;
        }
    }
    if (!continuous) {
        return Reason::Discontinuous;
    }
    if (cells.front() != ch.head_cell || cells.back() != ch.tail_cell) {
        return Reason::EndpointMismatch;
    }
    std::size_t entries = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        entries += (i == 0 || cells[i] != cells[i - 1]) ? 1 : 0;
    }
    if (entries > ch.max_len) {
        return Reason::TooLong;
    }
    std::vector<ImageId> images;
    for (Cell c : cells) {
        images.push_back(ch.layout.cell_to_image[c]);
    }
    if (!brute_subsequence(pw.image_ids, images)) {
        return Reason::OrderViolation;
    }
    return Reason::Ok;
}

/// Polyline to cells with `factor` times as many samples per segment as the
/// library uses, so the library's samples are a subset of these.
inline std::vector<Cell> fine_map(const Polyline& poly, const GridSpec& grid, int factor = 10) {
    const double step = 0.25 * std::min(1.0 / grid.cols(), 1.0 / grid.rows());
    auto cell = [&](double x, double y) {
        x = std::min(std::max(x, 0.0), 1.0);
        y = std::min(std::max(y, 0.0), 1.0);
        int c = static_cast<int>(x * grid.cols());
        int r = static_cast<int>(y * grid.rows());
        c = std::min(c, grid.cols() - 1);
        r = std::min(r, grid.rows() - 1);
        return static_cast<Cell>(r * grid.cols() + c);
    };
    std::vector<Cell> out{cell(poly.points[0].x, poly.points[0].y)};
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const auto& a = poly.points[i - 1];
        const auto& b = poly.points[i];
        const double ax = std::min(std::max(a.x, 0.0), 1.0), ay = std::min(std::max(a.y, 0.0), 1.0);
        const double bx = std::min(std::max(b.x, 0.0), 1.0), by = std::min(std::max(b.y, 0.0), 1.0);
        const double dist = std::sqrt((bx - ax) * (bx - ax) + (by - ay) * (by - ay));
        const long coarse = std::max(1L, static_cast<long>(std::ceil(dist / step)));
        const long samples = coarse * factor;
        for (long s = 1; s <= samples; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(samples);
            const Cell c = cell(ax + (bx - ax) * t, ay + (by - ay) * t);
            if (c != out.back()) {
                out.push_back(c);
            }
        }
    }
    return out;
}

/// Every ordered n-tuple over `universe` that embeds in all patterns and
/// avoids every excluded image, by exhaustive enumeration.
inline std::vector<std::vector<ImageId>> brute_candidates(std::size_t universe, std::size_t n,
                                                          const std::vector<std::vector<std::optional<ImageId>>>& patterns,
                                                          const std::vector<ImageId>& excluded) {
    std::vector<std::vector<ImageId>> out;
    std::vector<ImageId> tuple;
    std::vector<bool> used(universe, false);
    auto rec = [&](auto& self) -> void {
        if (tuple.size() == n) {
            for (const auto& p : patterns) {
                if (!brute_embeds(tuple, p)) {
                    return;
                }
            }
            out.push_back(tuple);
            return;
        }
        for (std::uint32_t v = 0; v < universe; ++v) {
            if (used[v]) {
                continue;
            }
            bool skip = false;
            for (ImageId e : excluded) {
                skip = skip || e.value == v;
            }
            if (skip) {
                continue;
            }
            used[v] = true;
            tuple.push_back(ImageId{v});
            self(self);
            tuple.pop_back();
            used[v] = false;
        }
    };
    rec(rec);
    return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

}  // namespace cds::oracle
