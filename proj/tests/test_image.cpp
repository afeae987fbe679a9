#include "cds/error.hpp"
#include "cds/image.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace cds;

namespace {

Raster gradient(int w, int h, int channels) {
    Raster r{w, h, channels, {}};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                r.pixels.push_back(static_cast<std::uint8_t>((x * 7 + y * 3 + c * 50) % 256));
            }
        }
    }
    return r;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("cds_img_" + random_nonce());
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("image") {

TEST_CASE("degrade_pixel examples") {
    const DegradeParams d;
    CHECK(degrade_pixel(128, d) == 192);
    CHECK(degrade_pixel(0, d) == 128);
    CHECK(degrade_pixel(255, d) == 255);
    const DegradeParams identity{1.0, 0.0};
    for (int p = 0; p < 256; ++p) {
        CHECK(degrade_pixel(p, identity) == p);
    }
}

TEST_CASE("degrade_pixel is monotone and mid-gray lands on 128 + beta") {
    for (double alpha : {0.1, 0.25, 0.5, 0.8, 1.0}) {
        for (double beta : {0.0, 10.0, 64.0, 127.0}) {
            const DegradeParams d{alpha, beta};
            CHECK(degrade_pixel(128, d) == static_cast<int>(128 + beta));
            for (int p = 1; p < 256; ++p) {
                CHECK(degrade_pixel(p, d) >= degrade_pixel(p - 1, d));
            }
        }
    }
}

TEST_CASE("degraded dynamic range shrinks by alpha") {
    const Raster img = gradient(40, 30, 3);
    const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double range = *hi - *lo;
    for (double alpha : {0.25, 0.5, 0.75}) {
        const DegradeParams d{alpha, 20.0};
        // pre-clamp: affine map scales the range exactly
        const double pre_hi = alpha * (*hi - 128) + 128 + d.beta;
        const double pre_lo = alpha * (*lo - 128) + 128 + d.beta;
        CHECK(pre_hi - pre_lo == doctest::Approx(alpha * range));

        const Raster out = degrade_image(img, d);
        const auto [olo, ohi] = std::minmax_element(out.pixels.begin(), out.pixels.end());
        // rounding to integers can add at most one level
        CHECK(*ohi - *olo <= alpha * range + 1.0);
    }
    const Raster out = degrade_image(img, DegradeParams{});
    const auto [olo, ohi] = std::minmax_element(out.pixels.begin(), out.pixels.end());
    CHECK(*ohi - *olo <= 0.5 * range);
}

TEST_CASE("degradation is deterministic and per channel") {
    const Raster img = gradient(17, 9, 3);
    const DegradeParams d{0.6, 30};
    const Raster a = degrade_image(img, d);
    CHECK(a == degrade_image(img, d));
    CHECK(a.width == 17);
    CHECK(a.height == 9);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        CHECK(a.pixels[i] == degrade_pixel(img.pixels[i], d));
    }
    CHECK_THROWS_AS(degrade_image(img, DegradeParams{0.0, 10}), Error);
    CHECK_THROWS_AS(degrade_image(img, DegradeParams{0.5, 300}), Error);
}

TEST_CASE("png round trip and content hash") {
    for (int channels : {1, 3}) {
        const Raster img = gradient(23, 11, channels);
        const auto png = encode_png(img);
        CHECK(decode_image(png) == img);
    }
    const Raster a = gradient(8, 8, 3);
    Raster b = a;
    b.pixels[5] ^= 1;
    CHECK(content_hash(a).size() == 64);
    CHECK(content_hash(a) == content_hash(a));
    CHECK(content_hash(a) != content_hash(b));
    // same bytes, different shape
    Raster c = a;
    c.width = 16;
    c.height = 4;
    CHECK(content_hash(a) != content_hash(c));

    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
    try {
        decode_image(junk);
        FAIL("expected UndecodableImage");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UndecodableImage);
    }
}

TEST_CASE("normalize crops to aspect then resizes") {
    const Dims target{160, 120};
    for (auto [w, h] : std::vector<std::pair<int, int>>{{640, 480}, {300, 100}, {50, 400}, {160, 120}, {7, 5}}) {
        const Raster out = normalize_image(gradient(w, h, 3), target);
        CHECK(out.width == 160);
        CHECK(out.height == 120);
        CHECK(out.channels == 3);
        CHECK(out.pixels.size() == 160u * 120u * 3u);
    }
    // already the right size: untouched
    const Raster exact = gradient(160, 120, 3);
    CHECK(normalize_image(exact, target) == exact);

    // a wide image keeps its central columns
    Raster wide{4, 1, 1, {10, 20, 30, 40}};
    const Raster mid = normalize_image(wide, Dims{2, 1});
    CHECK(mid.pixels == std::vector<std::uint8_t>{20, 30});
}

TEST_CASE("synthetic catalogs") {
    const Dims dims{64, 48};
    const ImageCatalog a = synth_catalog(24, 5, dims);
    CHECK(a.size() == 24);
    std::set<std::string> keys;
    for (ImageId id : a.ids()) {
        keys.insert(a.key_of(id));
        CHECK(a.raster(id).width == 64);
        CHECK(a.raster(id).height == 48);
        CHECK(a.id_of(a.key_of(id)) == id);
    }
    CHECK(keys.size() == 24);

    const ImageCatalog b = synth_catalog(24, 5, dims);
    for (ImageId id : a.ids()) {
        CHECK(a.key_of(id) == b.key_of(id));
        CHECK(a.raster(id) == b.raster(id));
    }
    CHECK(synth_catalog(1, 9, dims).size() == 1);
    CHECK(synth_catalog(24, 6, dims).key_of(ImageId{0}) != a.key_of(ImageId{0}));
    CHECK_THROWS_AS(synth_catalog(0, 1, dims), Error);
    CHECK_FALSE(a.id_of("nope").has_value());
}

TEST_CASE("catalog ids follow sorted keys and dedupe") {
    ImageCatalog cat(Dims{8, 8});
    const std::string k1 = cat.add(gradient(8, 8, 3));
    Raster other = gradient(8, 8, 3);
    other.pixels[0] = 255;
    const std::string k2 = cat.add(other);
    CHECK(cat.add(gradient(8, 8, 3)) == k1);
    CHECK(cat.size() == 2);
    CHECK(cat.key_of(ImageId{0}) == std::min(k1, k2));
    const ImageCatalog one = cat.truncated(1);
    CHECK(one.size() == 1);
    CHECK(one.key_of(ImageId{0}) == cat.key_of(ImageId{0}));
}

TEST_CASE("load_catalog from a directory") {
    TempDir dir;
    const Dims dims{40, 30};
    const GridSpec grid(4, 6);
    const ImageCatalog src = synth_catalog(24, 11, Dims{80, 50});
    for (ImageId id : src.ids()) {
        // mixed sizes: every other image upscaled differently
        Raster r = src.raster(id);
        if (id.value % 2) {
            r = normalize_image(r, Dims{33 + static_cast<int>(id.value), 91});
        }
        write_png(dir.path / ("img" + std::to_string(id.value) + ".png"), r);
    }
    std::ofstream(dir.path / "notes.txt") << "ignored";

    const ImageCatalog loaded = load_catalog(dir.path, dims, grid);
    CHECK(loaded.size() == 24);
    for (ImageId id : loaded.ids()) {
        CHECK(loaded.raster(id).width == 40);
        CHECK(loaded.raster(id).height == 30);
    }
    // same folder, same ids
    const ImageCatalog again = load_catalog(dir.path, dims, grid);
    for (ImageId id : loaded.ids()) {
        CHECK(loaded.key_of(id) == again.key_of(id));
    }

    SUBCASE("23 images is too few") {
        std::filesystem::remove(dir.path / "img0.png");
        try {
            load_catalog(dir.path, dims, grid);
            FAIL("expected TooFewImages");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::TooFewImages);
        }
    }
    SUBCASE("a corrupt file is reported") {
        std::ofstream(dir.path / "broken.png") << "not a png";
        try {
            load_catalog(dir.path, dims, grid);
            FAIL("expected UndecodableImage");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::UndecodableImage);
        }
    }
    SUBCASE("missing directory") {
        try {
            load_catalog(dir.path / "absent", dims, grid);
            FAIL("expected IoError");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::IoError);
        }
    }
}

}  // TEST_SUITE
