#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "specorr/image.hpp"

using namespace specorr;

namespace {

ImageRaster decode_string(const std::string& content) {
    std::istringstream in(content);
    return decode_pnm(in, "<memory>");
}

std::uint64_t lcg_next(std::uint64_t& s) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "specorr_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("decode_pnm reads ASCII PGM") {
    const ImageRaster img = decode_string("P2\n2 1\n255\n0 255\n");
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    REQUIRE(img.intensity.size() == 2);
    CHECK(img.intensity[0] == 0);
    CHECK(img.intensity[1] == 255);
}

TEST_CASE("decode_pnm reads an all-zero body") {
    const ImageRaster img =
        decode_string("P2\n4 4\n255\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
    CHECK(img.width == 4);
    CHECK(img.height == 4);
    for (std::uint8_t v : img.intensity) CHECK(v == 0);
}

TEST_CASE("decode_pnm handles header comments") {
    const ImageRaster img = decode_string("P2\n# a comment\n2 1\n# another\n255\n7 9\n");
    CHECK(img.intensity[0] == 7);
    CHECK(img.intensity[1] == 9);
}

TEST_CASE("decode_pnm rejects a truncated binary body") {
    std::string content = "P5\n3 2\n255\n";
    content += std::string(5, '\x01'); // 6 bytes declared, 5 present
    CHECK_THROWS_WITH_AS(decode_string(content), doctest::Contains("truncated body"),
                         std::runtime_error);
}

TEST_CASE("decode_pnm rejects values above maxval") {
    CHECK_THROWS_WITH_AS(decode_string("P2\n2 1\n100\n0 101\n"), doctest::Contains("maxval"),
                         std::runtime_error);
}

TEST_CASE("decode_pnm rejects garbage headers") {
    CHECK_THROWS_AS(decode_string("Q7\n2 1\n255\n0 1\n"), std::runtime_error);
    CHECK_THROWS_AS(decode_string("P2\n-2 1\n255\n0 1\n"), std::runtime_error);
}

TEST_CASE("load_raster reports a missing file") {
    CHECK_THROWS_WITH_AS(load_raster("/nonexistent/specorr.pgm"), doctest::Contains("cannot open"),
                         std::runtime_error);
}

TEST_CASE("PPM inputs collapse to luminance") {
    // one pure-red and one pure-white pixel
    const ImageRaster img = decode_string("P3\n2 1\n255\n255 0 0 255 255 255\n");
    CHECK(img.intensity[0] == 76); // round(0.299*255)
    CHECK(img.intensity[1] == 255);
}

TEST_CASE("binary PGM decodes byte-exactly") {
    std::string content = "P5\n2 2\n255\n";
    content += '\x00';
    content += '\x40';
    content += '\x80';
    content += '\xff';
    const ImageRaster img = decode_string(content);
    CHECK(img.intensity == std::vector<std::uint8_t>{0, 64, 128, 255});
}

TEST_CASE("PGM write/read round-trip preserves pixels") {
    std::uint64_t state = 42;
    for (int trial = 0; trial < 10; ++trial) {
        ImageRaster img;
        img.width = 1 + static_cast<int>(lcg_next(state) % 23);
        img.height = 1 + static_cast<int>(lcg_next(state) % 17);
        img.intensity.resize(static_cast<std::size_t>(img.width) * img.height);
        for (auto& v : img.intensity) v = static_cast<std::uint8_t>(lcg_next(state) & 0xFF);

        const auto path = temp_file("roundtrip.pgm");
        write_pgm(path.string(), img);
        const ImageRaster back = load_raster(path.string());
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.intensity == img.intensity);
    }
}

TEST_CASE("build_pyramid keeps a constant image constant") {
    ImageRaster img;
    img.width = 4;
    img.height = 4;
    img.intensity.assign(16, 7);
    const Pyramid p = build_pyramid(img, 2);
    REQUIRE(p.levels.size() == 2);
    CHECK(p.levels[1].width == 2);
    CHECK(p.levels[1].height == 2);
    for (std::uint8_t v : p.levels[1].intensity) CHECK(v == 7);
}

TEST_CASE("build_pyramid box filter rounds to nearest") {
    ImageRaster img;
    img.width = 2;
    img.height = 2;
    img.intensity = {0, 255, 0, 255};
    const Pyramid p = build_pyramid(img, 2);
    REQUIRE(p.levels.size() == 2);
    REQUIRE(p.levels[1].intensity.size() == 1);
    CHECK(p.levels[1].intensity[0] == 128);
}

TEST_CASE("build_pyramid with one level returns the input") {
    ImageRaster img;
    img.width = 3;
    img.height = 5;
    img.intensity.assign(15, 9);
    const Pyramid p = build_pyramid(img, 1);
    REQUIRE(p.levels.size() == 1);
    CHECK(p.levels[0].intensity == img.intensity);
}

TEST_CASE("build_pyramid rejects zero levels") {
    ImageRaster img;
    img.width = 2;
    img.height = 2;
    img.intensity.assign(4, 0);
    CHECK_THROWS_AS(build_pyramid(img, 0), std::invalid_argument);
}

TEST_CASE("pyramid dimensions follow the ceil-halving recurrence") {
    std::uint64_t state = 7;
    for (int trial = 0; trial < 8; ++trial) {
        ImageRaster img;
        img.width = 5 + static_cast<int>(lcg_next(state) % 60);
        img.height = 5 + static_cast<int>(lcg_next(state) % 60);
        img.intensity.assign(static_cast<std::size_t>(img.width) * img.height, 1);
        const Pyramid p = build_pyramid(img, 4);
        for (std::size_t k = 1; k < p.levels.size(); ++k) {
            CHECK(p.levels[k].width == (p.levels[k - 1].width + 1) / 2);
            CHECK(p.levels[k].height == (p.levels[k - 1].height + 1) / 2);
        }
    }
}

TEST_CASE("build_pyramid clamps levels to keep min_dim") {
    ImageRaster img;
    img.width = 20;
    img.height = 20;
    img.intensity.assign(400, 3);
    const Pyramid p = build_pyramid(img, 5, 16); // 20 -> 10 would drop below 16
    CHECK(p.levels.size() == 1);
}
