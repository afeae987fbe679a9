#include "cds/image.hpp"

#include "cds/error.hpp"

#include <openssl/evp.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>

namespace cds {

std::uint8_t degrade_pixel(int p, const DegradeParams& params) {
    const double v = std::round(params.alpha * (p - 128) + 128.0 + params.beta);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

Raster degrade_image(const Raster& image, const DegradeParams& params) {
    validate_degrade(params);
    std::array<std::uint8_t, 256> lut{};
    for (int p = 0; p < 256; ++p) {
        lut[static_cast<std::size_t>(p)] = degrade_pixel(p, params);
    }
    Raster out = image;
    for (auto& px : out.pixels) {
        px = lut[px];
    }
    return out;
}

std::string content_hash(const Raster& image) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    const std::array<std::int32_t, 3> header{image.width, image.height, image.channels};
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), header.data(), sizeof(header)) != 1 ||
        EVP_DigestUpdate(ctx.get(), image.pixels.data(), image.pixels.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error(Errc::IoError, "sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0x0f]);
    }
    return hex;
}

namespace {

cv::Mat to_mat(const Raster& image) {
    const int type = image.channels == 1 ? CV_8UC1 : CV_8UC3;
    cv::Mat rgb(image.height, image.width, type, const_cast<std::uint8_t*>(image.pixels.data()));
    cv::Mat out;
    if (image.channels == 3) {
        cv::cvtColor(rgb, out, cv::COLOR_RGB2BGR);
    } else {
        out = rgb.clone();
    }
    return out;
}

Raster from_mat(const cv::Mat& mat) {
    cv::Mat converted;
    int channels = 3;
    switch (mat.channels()) {
        case 1:
            converted = mat;
            channels = 1;
            break;
        case 4:
            cv::cvtColor(mat, converted, cv::COLOR_BGRA2RGB);
            break;
        default:
            cv::cvtColor(mat, converted, cv::COLOR_BGR2RGB);
            break;
    }
    if (converted.depth() != CV_8U) {
        converted.convertTo(converted, CV_8U);
    }
    converted = converted.isContinuous() ? converted : converted.clone();
    Raster r{converted.cols, converted.rows, channels, {}};
    r.pixels.assign(converted.data, converted.data + converted.total() * converted.elemSize());
    return r;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Raster& image) {
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", to_mat(image), bytes)) {
        throw Error(Errc::IoError, "png encoding failed");
    }
    return bytes;
}

Raster decode_image(std::span<const std::uint8_t> bytes) {
    cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    cv::Mat mat;
    try {
        mat = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception&) {
        mat.release();
    }
    if (mat.empty()) {
        throw Error(Errc::UndecodableImage, "could not decode image bytes");
    }
    return from_mat(mat);
}

void write_png(const std::filesystem::path& path, const Raster& image) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::IoError, "cannot write " + path.string());
    }
}

Raster normalize_image(const Raster& image, Dims dims) {
    if (dims.width <= 0 || dims.height <= 0) {
        throw Error(Errc::InvalidConfig, "target dimensions must be positive");
    }
    const cv::Mat src = to_mat(image);
    const double target_aspect = static_cast<double>(dims.width) / dims.height;
    const double aspect = static_cast<double>(src.cols) / src.rows;
    cv::Rect crop(0, 0, src.cols, src.rows);
    if (aspect > target_aspect) {
        crop.width = std::max(1, static_cast<int>(std::lround(src.rows * target_aspect)));
        crop.x = (src.cols - crop.width) / 2;
    } else if (aspect < target_aspect) {
        crop.height = std::max(1, static_cast<int>(std::lround(src.cols / target_aspect)));
        crop.y = (src.rows - crop.height) / 2;
    }
    cv::Mat resized;
    const int interp = crop.width >= dims.width ? cv::INTER_AREA : cv::INTER_LINEAR;
    cv::resize(src(crop), resized, cv::Size(dims.width, dims.height), 0, 0, interp);
    return from_mat(resized);
}

std::string ImageCatalog::add(Raster image) {
    if (image.width != dims_.width || image.height != dims_.height) {
        throw Error(Errc::InvalidConfig, "catalog images must share dimensions " +
                                             std::to_string(dims_.width) + "x" + std::to_string(dims_.height));
    }
    std::string key = content_hash(image);
    if (entries_.emplace(key, std::move(image)).second) {
        reindex();
    }
    return key;
}

void ImageCatalog::reindex() {
    keys_.clear();
    keys_.reserve(entries_.size());
    for (const auto& [key, raster] : entries_) {
        keys_.push_back(key);
    }
}

std::vector<ImageId> ImageCatalog::ids() const {
    std::vector<ImageId> out(keys_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = ImageId{static_cast<std::uint32_t>(i)};
    }
    return out;
}

const std::string& ImageCatalog::key_of(ImageId id) const {
    if (id.value >= keys_.size()) {
        throw Error(Errc::UnknownImageId, "image " + std::to_string(id.value) + " not in catalog");
    }
    return keys_[id.value];
}

std::optional<ImageId> ImageCatalog::id_of(const std::string& key) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) {
        return std::nullopt;
    }
    return ImageId{static_cast<std::uint32_t>(it - keys_.begin())};
}

const Raster& ImageCatalog::raster(ImageId id) const {
    return entries_.at(key_of(id));
}

ImageCatalog ImageCatalog::truncated(std::size_t count) const {
    ImageCatalog out(dims_);
    for (std::size_t i = 0; i < std::min(count, keys_.size()); ++i) {
        out.entries_.emplace(keys_[i], entries_.at(keys_[i]));
    }
    out.reindex();
    return out;
}

ImageCatalog load_catalog(const std::filesystem::path& directory, Dims dims, const GridSpec& grid) {
    static const std::array<std::string, 9> kExtensions{".png", ".jpg", ".jpeg", ".bmp", ".ppm",
                                                        ".pgm", ".tif", ".tiff", ".webp"};
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec)) {
        throw Error(Errc::IoError, "not a readable directory: " + directory.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (std::find(kExtensions.begin(), kExtensions.end(), ext) != kExtensions.end()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    ImageCatalog catalog(dims);
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        Raster decoded;
        try {
            decoded = decode_image(bytes);
        } catch (const Error&) {
            throw Error(Errc::UndecodableImage, file.string());
        }
        if (decoded.channels == 1) {
            // Mixed gray/RGB folders would otherwise hash the same picture differently.
            Raster rgb{decoded.width, decoded.height, 3, {}};
            rgb.pixels.reserve(decoded.pixels.size() * 3);
            for (auto v : decoded.pixels) {
                rgb.pixels.insert(rgb.pixels.end(), {v, v, v});
            }
            decoded = std::move(rgb);
        }
        catalog.add(normalize_image(decoded, dims));
    }
    if (catalog.size() < grid.cell_count()) {
        throw Error(Errc::TooFewImages, "found " + std::to_string(catalog.size()) + " distinct images in " +
                                            directory.string() + ", grid needs " +
                                            std::to_string(grid.cell_count()));
    }
    return catalog;
}

ImageCatalog synth_catalog(std::size_t count, Seed seed, Dims dims) {
    if (count < 1) {
        throw Error(Errc::InvalidRange, "synth_catalog needs at least one image");
    }
    Rng rng(seed);
    const double hue_offset = uniform_unit(rng) * 180.0;
    ImageCatalog catalog(dims);
    for (std::size_t i = 0; i < count; ++i) {
        const double hue = std::fmod(hue_offset + 180.0 * static_cast<double>(i) / static_cast<double>(count), 180.0);
        cv::Mat hsv(dims.height, dims.width, CV_8UC3,
                    cv::Scalar(hue, 90 + static_cast<double>(uniform_below(rng, 100)),
                               150 + static_cast<double>(uniform_below(rng, 80))));
        cv::Mat bgr;
        cv::cvtColor(hsv, bgr, cv::COLOR_HSV2BGR);

        // Glyph: a random polygon plus the image number.
        const int vertices = 3 + static_cast<int>(uniform_below(rng, 5));
        std::vector<cv::Point> poly;
        const cv::Point centre(dims.width / 2, dims.height / 2);
        const double radius = 0.35 * std::min(dims.width, dims.height);
        for (int v = 0; v < vertices; ++v) {
            const double angle = 2.0 * 3.14159265358979323846 * v / vertices + uniform_unit(rng) * 0.6;
            const double r = radius * (0.6 + 0.4 * uniform_unit(rng));
            poly.emplace_back(centre.x + static_cast<int>(std::lround(r * std::cos(angle))),
                              centre.y + static_cast<int>(std::lround(r * std::sin(angle))));
        }
        const cv::Scalar ink(static_cast<double>(uniform_below(rng, 80)), static_cast<double>(uniform_below(rng, 80)),
                             static_cast<double>(uniform_below(rng, 80)));
        cv::fillPoly(bgr, std::vector<std::vector<cv::Point>>{poly}, ink, cv::LINE_8);
        const double scale = std::max(0.3, std::min(dims.width, dims.height) / 120.0);
        cv::putText(bgr, std::to_string(i + 1), cv::Point(4, static_cast<int>(20 * scale)),
                    cv::FONT_HERSHEY_SIMPLEX, 0.6 * scale, cv::Scalar(255, 255, 255), 1, cv::LINE_8);
        catalog.add(from_mat(bgr));
    }
    return catalog;
}

}  // namespace cds
