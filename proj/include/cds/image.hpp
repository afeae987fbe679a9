#pragma once

#include "cds/random.hpp"
#include "cds/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cds {

/// Interleaved 8-bit raster, 1 (gray) or 3 (RGB) channels, row-major.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<std::uint8_t> pixels;

    friend bool operator==(const Raster&, const Raster&) = default;
};

struct Dims {
    int width = 160;
    int height = 120;
};

/// clamp(round(alpha * (p - 128) + 128 + beta), 0, 255)
std::uint8_t degrade_pixel(int p, const DegradeParams& params);

Raster degrade_image(const Raster& image, const DegradeParams& params);

/// Hex SHA-256 over dimensions, channel count and pixel bytes.
std::string content_hash(const Raster& image);

std::vector<std::uint8_t> encode_png(const Raster& image);
Raster decode_image(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path& path, const Raster& image);

/// Center-crop to the target aspect ratio, then resize to exactly `dims`.
Raster normalize_image(const Raster& image, Dims dims);

/// Images keyed by content hash. ImageId i refers to the i-th key in sorted
/// order, so ids are stable for a given set of images regardless of file
/// names or load order.
class ImageCatalog {
public:
    ImageCatalog() = default;
    explicit ImageCatalog(Dims dims) : dims_(dims) {}

    /// Returns the content-hash key. Adding an identical raster twice keeps one entry.
    std::string add(Raster image);

    std::size_t size() const noexcept { return entries_.size(); }
    Dims dims() const noexcept { return dims_; }

    std::vector<ImageId> ids() const;
    const std::string& key_of(ImageId id) const;
    std::optional<ImageId> id_of(const std::string& key) const;
    const Raster& raster(ImageId id) const;

    /// The first `count` images in id order. Deployments display a fixed set
    /// of exactly one grid's worth of images.
    ImageCatalog truncated(std::size_t count) const;

private:
    void reindex();

    Dims dims_{};
    std::map<std::string, Raster> entries_;
    std::vector<std::string> keys_;
};

/// Loads every raster file in `directory` (png, jpg, jpeg, bmp, ppm, pgm,
/// tif, tiff, webp); other files are ignored.
ImageCatalog load_catalog(const std::filesystem::path& directory, Dims dims, const GridSpec& grid);

/// Procedural catalog: one background hue and one glyph per image.
ImageCatalog synth_catalog(std::size_t count, Seed seed, Dims dims);

}  // namespace cds
