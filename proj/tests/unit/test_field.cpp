#include <doctest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "helpers.hpp"

using namespace odtqc;
using testing::random_field;

namespace {

// Direct O(N^4) unitary DFT, DC-centered output.
std::vector<cplx> direct_dft(const ComplexField2D& f) {
    const int w = f.width, h = f.height;
    std::vector<cplx> out(f.values.size());
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) {
            cplx acc = 0.0;
            const int fu = u - w / 2, fv = v - h / 2;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double ang = -2.0 * std::numbers::pi * (double(fu * x) / w + double(fv * y) / h);
                    acc += f.at(x, y) * std::polar(1.0, ang);
                }
            out[static_cast<std::size_t>(v) * w + u] = acc / std::sqrt(double(w) * h);
        }
    return out;
}

}  // namespace

TEST_CASE("fft2 of a delta is flat with magnitude 1/N") {
    ComplexField2D f(8, 8, 0.16);
    f.at(0, 0) = 1.0;
    const auto s = fft2_forward(f);
    for (const auto& v : s.values) CHECK(std::abs(v) == doctest::Approx(1.0 / 8).epsilon(1e-14));
}

TEST_CASE("fft2 of a constant has a single DC bin c*N") {
    const cplx c{0.7, -1.3};
    ComplexField2D f(16, 16, 0.16, c);
    const auto s = fft2_forward(f);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            if (x == 8 && y == 8)
                CHECK(std::abs(s.at(x, y) - c * 16.0) < 1e-12);
            else
                CHECK(std::abs(s.at(x, y)) < 1e-12);
        }
}

TEST_CASE("fft2 matches a direct DFT sum") {
    const auto f = random_field(16, 16, 11);
    const auto s = fft2_forward(f);
    const auto ref = direct_dft(f);
    CHECK(testing::max_abs_diff(s.values, ref) / testing::max_abs(ref) < 1e-10);
}

TEST_CASE("fft2 on non-square grids matches the direct sum") {
    const auto f = random_field(8, 4, 3);
    CHECK(testing::max_abs_diff(fft2_forward(f).values, direct_dft(f)) < 1e-10);
}

TEST_CASE("fft2 round trip, Parseval and linearity") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto f = random_field(32, 32, seed);
        const auto s = fft2_forward(f);
        double e1 = 0, e2 = 0;
        for (const auto& v : f.values) e1 += std::norm(v);
        for (const auto& v : s.values) e2 += std::norm(v);
        CHECK(std::abs(e1 - e2) / e1 < 1e-10);
        const auto back = fft2_inverse(s);
        CHECK(testing::max_abs_diff(back.values, f.values) / testing::max_abs(f.values) < 1e-12);
        CHECK(back.pixel_pitch == doctest::Approx(f.pixel_pitch).epsilon(1e-14));
    }
    const auto x = random_field(16, 16, 1), y = random_field(16, 16, 2);
    const cplx a{1.5, -0.25}, b{-0.75, 2.0};
    ComplexField2D z(16, 16, 0.16);
    for (std::size_t i = 0; i < z.size(); ++i) z.values[i] = a * x.values[i] + b * y.values[i];
    const auto sx = fft2_forward(x), sy = fft2_forward(y), sz = fft2_forward(z);
    std::vector<cplx> comb(sz.values.size());
    for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = a * sx.values[i] + b * sy.values[i];
    CHECK(testing::max_abs_diff(sz.values, comb) / testing::max_abs(comb) < 1e-10);
}

TEST_CASE("fft rejects non-power-of-two sizes") {
    ComplexField2D f(12, 8, 0.16);
    CHECK_THROWS_AS(fft2_forward(f), Error);
    std::vector<cplx> v(6);
    CHECK_THROWS_AS(fft::transform_1d(v, fft::Direction::forward), Error);
}

TEST_CASE("3D transform matches separable 1D transforms and round-trips") {
    const std::size_t nx = 4, ny = 8, nz = 2;
    Rng r(5);
    std::vector<cplx> v(nx * ny * nz);
    for (auto& c : v) c = {r.normal(), r.normal()};
    auto ref = v;
    for (std::size_t z = 0; z < nz; ++z)
        fft::transform_2d(std::span(ref).subspan(z * nx * ny, nx * ny), nx, ny, fft::Direction::forward);
    for (std::size_t i = 0; i < nx * ny; ++i) {
        std::vector<cplx> col(nz);
        for (std::size_t z = 0; z < nz; ++z) col[z] = ref[z * nx * ny + i];
        fft::transform_1d(col, fft::Direction::forward);
        for (std::size_t z = 0; z < nz; ++z) ref[z * nx * ny + i] = col[z];
    }
    auto got = v;
    fft::transform_3d(got, nx, ny, nz, fft::Direction::forward);
    CHECK(testing::max_abs_diff(got, ref) < 1e-12);
    fft::transform_3d(got, nx, ny, nz, fft::Direction::inverse);
    CHECK(testing::max_abs_diff(got, v) < 1e-12);
}

TEST_CASE("frequency pitch is 2 pi / (N pitch)") {
    CHECK(frequency_pitch(256, 0.16) == doctest::Approx(2 * std::numbers::pi / (256 * 0.16)));
    const auto s = fft2_forward(ComplexField2D(16, 8, 0.5));
    CHECK(s.freq_pitch_x == doctest::Approx(2 * std::numbers::pi / 8.0));
    CHECK(s.freq_pitch_y == doctest::Approx(2 * std::numbers::pi / 4.0));
}

TEST_CASE("wrap_phase examples and idempotence") {
    const double pi = std::numbers::pi;
    CHECK(wrap_phase(0.0) == 0.0);
    CHECK(wrap_phase(3 * pi) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(wrap_phase(-4.5) == doctest::Approx(-4.5 + 2 * pi).epsilon(1e-15));
    CHECK(wrap_phase(pi) == pi);
    CHECK(wrap_phase(-pi) == pi);
    Rng r(9);
    for (int i = 0; i < 10000; ++i) {
        const double x = r.uniform(-100.0, 100.0);
        const double w = wrap_phase(x);
        CHECK(w > -pi);
        CHECK(w <= pi);
        CHECK(wrap_phase(w) == w);
        CHECK(std::abs(std::remainder(x - w, 2 * pi)) < 1e-12);
    }
    CHECK_THROWS_AS(wrap_phase(std::nan("")), Error);
}

TEST_CASE("center_crop windows") {
    RealImage img(256, 256);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x) img.at(x, y) = y * 1000 + x;
    const auto c = center_crop(img, 128);
    CHECK(c.width == 128);
    CHECK(c.at(0, 0) == 64 * 1000 + 64);
    CHECK(c.at(127, 127) == 191 * 1000 + 191);
    CHECK(center_crop(img, 256).values == img.values);

    RealImage ramp(6, 6);
    for (int i = 0; i < 36; ++i) ramp.values[i] = i;
    const auto r2 = center_crop(ramp, 2);
    CHECK(r2.values == std::vector<double>{2 * 6 + 2, 2 * 6 + 3, 3 * 6 + 2, 3 * 6 + 3});
    CHECK_THROWS_AS(center_crop(ramp, 8), Error);
    CHECK_THROWS_AS(center_crop(ramp, 3), Error);

    const auto f = random_field(16, 16, 4);
    const auto fc = center_crop(f, 8);
    CHECK(fc.at(0, 0) == f.at(4, 4));
    CHECK(fc.pixel_pitch == f.pixel_pitch);
}

TEST_CASE("field invariants are enforced") {
    ComplexField2D f(4, 4, 0.16);
    CHECK_NOTHROW(f.validate());
    f.values[3] = {std::numeric_limits<double>::infinity(), 0.0};
    CHECK_THROWS_AS(f.validate(), Error);
    ComplexField2D g(4, 4, -1.0);
    CHECK_THROWS_AS(g.validate(), Error);
}
