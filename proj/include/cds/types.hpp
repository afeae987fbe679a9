#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cds {

using Cell = std::size_t;
using Clock = std::chrono::system_clock;
using TimePoint = Clock::time_point;

/// Index of an image in a catalog. Catalog-level string keys (content
/// hashes) are mapped onto these by the catalog and the service.
struct ImageId {
    std::uint32_t value = 0;

    friend auto operator<=>(const ImageId&, const ImageId&) = default;
};

/// Grid of `cols` (w) images per row and `rows` (l) images per column.
/// Cells are numbered row-major from 0.
class GridSpec {
public:
    GridSpec() = default;
    GridSpec(int cols, int rows);

    int cols() const noexcept { return cols_; }
    int rows() const noexcept { return rows_; }
    std::size_t cell_count() const noexcept {
        return static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
    }

    bool contains(Cell cell) const noexcept { return cell < cell_count(); }
    int row_of(Cell cell) const noexcept { return static_cast<int>(cell / static_cast<std::size_t>(cols_)); }
    int col_of(Cell cell) const noexcept { return static_cast<int>(cell % static_cast<std::size_t>(cols_)); }
    Cell cell_at(int row, int col) const noexcept {
        return static_cast<Cell>(row) * static_cast<Cell>(cols_) + static_cast<Cell>(col);
    }

    /// True when both cells are on the grid, distinct, and touch by an edge
    /// or a corner.
    bool adjacent8(Cell a, Cell b) const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int cols_ = 4;
    int rows_ = 6;
};

/// Ordered pass-images; the story order is the order of `image_ids`.
struct Password {
    std::vector<ImageId> image_ids;

    std::size_t size() const noexcept { return image_ids.size(); }
};

/// Throws InvalidPassword unless ids are distinct and 1 <= n <= cells - 2.
void validate_password(const Password& password, const GridSpec& grid);

struct Layout {
    std::vector<ImageId> cell_to_image;

    ImageId image_at(Cell cell) const { return cell_to_image.at(cell); }
    std::optional<Cell> cell_of(ImageId image) const noexcept;
};

/// Login-time image degradation: contrast factor `alpha` about mid-gray and
/// brightness offset `beta`.
struct DegradeParams {
    double alpha = 0.5;
    double beta = 64.0;

    friend bool operator==(const DegradeParams&, const DegradeParams&) = default;
};

/// Throws InvalidConfig unless 0 < alpha <= 1 and 0 <= beta <= 255.
void validate_degrade(const DegradeParams& params);

struct Challenge {
    std::string nonce;
    GridSpec grid;
    Layout layout;
    Cell head_cell = 0;
    Cell tail_cell = 0;
    std::size_t max_len = 0;
    DegradeParams degrade;
    TimePoint expires_at;
};

struct CellTrace {
    std::vector<Cell> cells;

    friend bool operator==(const CellTrace&, const CellTrace&) = default;
};

/// Normalized drawing-surface point; x grows rightwards, y downwards.
struct Point {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> t_ms;
};

struct Polyline {
    std::vector<Point> points;
};

enum class Reason { Ok, Discontinuous, EndpointMismatch, TooLong, OrderViolation };

std::string_view to_string(Reason reason) noexcept;

struct Decision {
    bool accepted = false;
    Reason reason = Reason::OrderViolation;

    static Decision accept() noexcept { return {true, Reason::Ok}; }
    static Decision reject(Reason why) noexcept { return {false, why}; }

    friend bool operator==(const Decision&, const Decision&) = default;
};

}  // namespace cds
