#include <doctest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "helpers.hpp"
#include "optics.hpp"
#include "phantom.hpp"
#include "retrieval.hpp"
#include "simulate.hpp"

using namespace odtqc;

namespace {

constexpr double kPi = std::numbers::pi;

// 1 + small perturbation whose spectrum lies strictly inside `radius_bins`.
ComplexField2D band_limited(int n, double pitch, int radius_bins, std::uint64_t seed) {
    Rng r(seed);
    Spectrum2D s;
    s.width = s.height = n;
    s.freq_pitch_x = s.freq_pitch_y = frequency_pitch(n, pitch);
    s.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const int fx = x - n / 2, fy = y - n / 2;
            if (fx * fx + fy * fy <= radius_bins * radius_bins) s.at(x, y) = {r.normal() * 0.05, r.normal() * 0.05};
        }
    s.at(n / 2, n / 2) = static_cast<double>(n);  // unit mean
    return fft2_inverse(s);
}

PhaseImage smooth_phase(int n, std::uint64_t seed, double scale) {
    Rng r(seed);
    const double a = r.uniform(0.5, 1.5), b = r.uniform(0.5, 1.5), c = r.uniform(-1, 1), d = r.uniform(0, 6);
    PhaseImage p(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double u = double(x) / n, v = double(y) / n;
            p.at(x, y) = scale * (a * std::sin(2 * kPi * u + d) + b * std::cos(3 * kPi * v) + c * u * v);
        }
    return p;
}

}  // namespace

TEST_CASE("pure carrier demodulates to unity") {
    const int n = 64;
    const double dk = frequency_pitch(n, 0.16);
    const Vec2 q{12 * dk, -6 * dk};
    const auto h = synthesize_hologram(ComplexField2D(n, n, 0.16, 1.0), q, 1.0);
    const auto f = retrieve_field(h, 0.16, q, 4 * dk);
    for (const auto& v : f.values) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-10);
}

TEST_CASE("zero hologram gives a zero field; retrieval is linear") {
    const int n = 64;
    const double dk = frequency_pitch(n, 0.16);
    const Vec2 q{16 * dk, 8 * dk};
    const auto z = retrieve_field(RealImage(n, n), 0.16, q, 5 * dk);
    for (const auto& v : z.values) CHECK(v == cplx(0.0, 0.0));

    Rng r(4);
    RealImage h1(n, n), h2(n, n), h3(n, n);
    const double a = 0.7, b = -1.9;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        h1.values[i] = r.uniform();
        h2.values[i] = r.uniform();
        h3.values[i] = a * h1.values[i] + b * h2.values[i];
    }
    const auto f1 = retrieve_field(h1, 0.16, q, 5 * dk), f2 = retrieve_field(h2, 0.16, q, 5 * dk);
    const auto f3 = retrieve_field(h3, 0.16, q, 5 * dk);
    for (std::size_t i = 0; i < f3.size(); ++i) CHECK(std::abs(f3.values[i] - (a * f1.values[i] + b * f2.values[i])) < 1e-10);
}

TEST_CASE("synthesize then retrieve recovers an in-band field") {
    const int n = 64;
    const double dk = frequency_pitch(n, 0.16);
    const auto u = band_limited(n, 0.16, 5, 9);
    const Vec2 q{16 * dk, 8 * dk};
    const auto back = retrieve_field(synthesize_hologram(u, q, 1.0), 0.16, q, 5.5 * dk);
    CHECK(testing::max_abs_diff(back.values, u.values) / testing::max_abs(u.values) < 1e-3);
}

TEST_CASE("retrieval preconditions") {
    RealImage h(64, 64);
    const double dk = frequency_pitch(64, 0.16);
    CHECK_THROWS_AS(retrieve_field(h, 0.16, {4 * dk, 0}, 5 * dk), Error);    // crop wider than |q|
    CHECK_THROWS_AS(retrieve_field(h, 0.16, {28 * dk, 0}, 8 * dk), Error);   // off the spectrum
}

TEST_CASE("normalize_background examples") {
    const auto s = testing::random_field(16, 16, 1);
    for (const auto& v : normalize_background(s, s).values) CHECK(std::abs(v - cplx(1, 0)) < 1e-15);
    const auto half = normalize_background(s, ComplexField2D(16, 16, 0.16, 2.0));
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(half.values[i] == s.values[i] / 2.0);
    ComplexField2D bg(16, 16, 0.16, 1.0);
    bg.at(3, 5) = 1e-9;
    try {
        normalize_background(s, bg);
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("(3, 5)") != std::string::npos);
    }
}

TEST_CASE("simulate, synthesize, retrieve and normalize reproduce the simulated field") {
    // Fine pitch so the pupil band and its hologram sideband separate.
    OpticsConfig o;
    o.detector_pixels = 128;
    o.pixel_pitch = 0.08;
    o.num_angles = 3;
    PhantomShape bead;
    bead.radius = 1.0;
    bead.delta_n = 0.003;
    const auto phantom = make_phantom({bead}, {128, 128, 32, 0.08}, o.n_medium);
    const auto k = illumination_set(o)[0];
    const auto u = simulate_field(phantom, k, o);
    const double dk = frequency_pitch(128, 0.08);
    const Vec2 q{20 * dk, 20 * dk};
    const double crop = o.pupil_radius();
    const auto s = retrieve_field(synthesize_hologram(u, q, 1.0), 0.08, q, crop);
    const auto b = retrieve_field(synthesize_hologram(ComplexField2D(128, 128, 0.08, 1.0), q, 1.0), 0.08, q, crop);
    const auto got = normalize_background(s, b);
    CHECK(testing::max_abs_diff(got.values, u.values) / testing::max_abs(u.values) < 1e-3);
}

TEST_CASE("unwrap: smooth input needs a single global offset") {
    auto p = smooth_phase(32, 1, 0.5);
    for (double& v : p.values) v = wrap_phase(v);
    const auto u = unwrap_phase(p);
    const double k = std::round((u.values[0] - p.values[0]) / (2 * kPi));
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(u.values[i] == doctest::Approx(p.values[i] + 2 * kPi * k));
}

TEST_CASE("unwrap: wrapped ramp of slope 0.9 pi per pixel") {
    const int n = 64;
    PhaseImage ramp(n, n), wrapped(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            ramp.at(x, y) = 0.9 * kPi * x + 0.3 * kPi * y;
            wrapped.at(x, y) = wrap_phase(ramp.at(x, y));
        }
    for (const auto& quality : {std::optional<RealImage>{}, std::optional<RealImage>{RealImage(n, n, 1.0)}}) {
        const auto u = unwrap_phase(wrapped, quality);
        const double off = u.values[0] - ramp.values[0];
        CHECK(std::abs(std::remainder(off, 2 * kPi)) < 1e-9);
        double dev = 0;
        for (std::size_t i = 0; i < u.size(); ++i) dev = std::max(dev, std::abs(u.values[i] - ramp.values[i] - off));
        CHECK(dev < 1e-9);
    }
}

TEST_CASE("unwrap: wrap(unwrap(x)) == x bit for bit on 100 smooth fields") {
    // Wraps of smooth fields (< pi per pixel) referenced to 0 at the
    // highest-amplitude pixel; unwrapping rebuilds them exactly.
    const int n = 32;
    RealImage amp(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) amp.at(x, y) = 1.0 / (1.0 + std::hypot(x - 16.0, y - 16.0));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = smooth_phase(n, seed, 3.0);
        const double ref = s.at(16, 16);
        for (double& v : s.values) v -= ref;
        const auto p = wrap_phase(s);
        const auto u = unwrap_phase(p, amp);
        CHECK(u.values == s.values);
        CHECK(wrap_phase(u).values == p.values);
    }
}

TEST_CASE("unwrap: the seed is the highest-quality pixel and keeps its value") {
    PhaseImage p(8, 8, 3.0);
    p.at(2, 2) = 3.1;
    RealImage q(8, 8, 0.0);
    q.at(5, 6) = 1.0;
    p.at(5, 6) = -3.0;
    const auto u = unwrap_phase(p, q);
    CHECK(u.at(5, 6) == -3.0);
    CHECK(u.at(0, 0) == doctest::Approx(3.0 - 2 * kPi));
}
