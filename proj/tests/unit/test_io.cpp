#include <doctest.h>

#include <cstring>

#include "error.hpp"
#include "helpers.hpp"
#include "io.hpp"
#include "volume.hpp"

using namespace odtqc;

TEST_CASE("OFC1 layout and round trip") {
    auto f = testing::random_field(4, 2, 1, 0.25);
    const std::string bytes = encode_field(f);
    REQUIRE(bytes.size() == 4 + 4 + 4 + 8 + 8 * 16);
    CHECK(bytes.substr(0, 4) == "OFC1");
    std::uint32_t w = 0;
    std::memcpy(&w, bytes.data() + 4, 4);
    CHECK(w == 4);
    double pitch = 0;
    std::memcpy(&pitch, bytes.data() + 12, 8);
    CHECK(pitch == 0.25);
    double re1 = 0;
    std::memcpy(&re1, bytes.data() + 20 + 16, 8);
    CHECK(re1 == f.values[1].real());
    const auto g = decode_field(bytes);
    CHECK(g.values == f.values);
    CHECK(encode_field(g) == bytes);
}

TEST_CASE("decoders reject corrupt input with context") {
    auto bytes = encode_field(testing::random_field(4, 4, 2));
    CHECK_THROWS_AS(decode_field(bytes.substr(0, bytes.size() - 3), "x.ofc"), Error);
    bytes[0] = 'X';
    try {
        decode_field(bytes, "x.ofc");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
        CHECK(std::string(e.what()).find("x.ofc") != std::string::npos);
    }
    CHECK_THROWS_AS(load_field("/nonexistent/dir/f.ofc"), Error);
}

TEST_CASE("OPH1 and RIV1 round trips") {
    RealImage img(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(decode_phase(encode_phase(img)).values == img.values);
    RIVolume v;
    v.nx = 2;
    v.ny = 2;
    v.nz = 2;
    v.voxel_pitch = 0.2;
    v.n_medium = 1.337;
    v.values = {1.337, 1.34, 1.35, 1.337, 1.337, 1.337, 1.4, 1.337};
    const auto s = encode_volume(v);
    CHECK(s.substr(0, 4) == "RIV1");
    const auto u = decode_volume(s);
    CHECK(u.values == v.values);
    CHECK(u.n_medium == v.n_medium);
    CHECK(u.at(0, 1, 1) == v.values[6]);
}

TEST_CASE("file helpers create parent directories and report paths") {
    const auto dir = testing::scratch("io");
    const auto p = dir / "a" / "b" / "f.ofc";
    save_field(p, testing::random_field(2, 2, 3));
    CHECK(std::filesystem::exists(p));
    CHECK(load_field(p).width == 2);
}

TEST_CASE("CRC32 matches the standard check value") {
    CHECK(crc32_of("123456789") == 0xCBF43926u);
}

TEST_CASE("PNG encoder writes a valid signature and IHDR") {
    RealImage img(5, 3, 0.5);
    const auto png = encode_png_gray(img, 0.0, 1.0);
    CHECK(png.substr(1, 3) == "PNG");
    CHECK(png.substr(12, 4) == "IHDR");
    CHECK(png.substr(png.size() - 8, 4) == "IEND");
}
