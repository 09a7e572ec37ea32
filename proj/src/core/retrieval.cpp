#include "retrieval.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "error.hpp"

namespace odtqc {

ComplexField2D retrieve_field(const RealImage& hologram, double pixel_pitch, Vec2 carrier, double crop_radius) {
    hologram.validate();
    require(pixel_pitch > 0.0, "pixel pitch must be positive");
    require(crop_radius > 0.0, "crop radius must be positive");
    const double qmag = std::hypot(carrier.x, carrier.y);
    require(crop_radius <= qmag, "crop radius must not exceed the carrier magnitude (sideband would include DC)");
    const double nyquist = std::numbers::pi / pixel_pitch;
    if (std::abs(carrier.x) + crop_radius > nyquist || std::abs(carrier.y) + crop_radius > nyquist)
        fail_invalid("sideband crop circle exceeds the spectrum bounds");

    ComplexField2D holo(hologram.width, hologram.height, pixel_pitch);
    for (std::size_t i = 0; i < hologram.size(); ++i) holo.values[i] = hologram.values[i];
    const Spectrum2D spec = fft2_forward(holo);

    const int w = spec.width, h = spec.height;
    const double cx = -carrier.x, cy = -carrier.y;
    const int sx = static_cast<int>(std::lround(cx / spec.freq_pitch_x));
    const int sy = static_cast<int>(std::lround(cy / spec.freq_pitch_y));

    Spectrum2D shifted = spec;
    std::fill(shifted.values.begin(), shifted.values.end(), cplx{});
    for (int iy = 0; iy < h; ++iy) {
        const double ky = (iy - h / 2) * spec.freq_pitch_y;
        for (int ix = 0; ix < w; ++ix) {
            const double kx = (ix - w / 2) * spec.freq_pitch_x;
            if (std::hypot(kx - cx, ky - cy) > crop_radius) continue;
            const int tx = ix - sx, ty = iy - sy;
            if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
            shifted.at(tx, ty) = spec.at(ix, iy);
        }
    }
    return fft2_inverse(shifted);
}

ComplexField2D normalize_background(const ComplexField2D& sample, const ComplexField2D& background) {
    sample.validate();
    background.validate();
    require(sample.width == background.width && sample.height == background.height,
            "sample and background dimensions differ");
    ComplexField2D out = sample;
    for (int y = 0; y < sample.height; ++y) {
        for (int x = 0; x < sample.width; ++x) {
            const cplx b = background.at(x, y);
            if (std::abs(b) < 1e-6)
                fail_invalid("background amplitude below 1e-6 at pixel (" + std::to_string(x) + ", " +
                             std::to_string(y) + ")");
            out.at(x, y) = sample.at(x, y) / b;
        }
    }
    return out;
}

namespace {

struct Frontier {
    double quality;
    std::size_t index;
    std::size_t from;
};

struct FrontierOrder {
    bool operator()(const Frontier& a, const Frontier& b) const {
        if (a.quality != b.quality) return a.quality < b.quality;
        return a.index > b.index;
    }
};

RealImage smoothness_quality(const PhaseImage& wrapped) {
    RealImage q(wrapped.width, wrapped.height);
    for (int y = 0; y < wrapped.height; ++y) {
        for (int x = 0; x < wrapped.width; ++x) {
            double acc = 0.0;
            const double c = wrapped.at(x, y);
            if (x > 0) acc += std::pow(wrap_phase(wrapped.at(x - 1, y) - c), 2);
            if (x + 1 < wrapped.width) acc += std::pow(wrap_phase(wrapped.at(x + 1, y) - c), 2);
            if (y > 0) acc += std::pow(wrap_phase(wrapped.at(x, y - 1) - c), 2);
            if (y + 1 < wrapped.height) acc += std::pow(wrap_phase(wrapped.at(x, y + 1) - c), 2);
            q.at(x, y) = -acc;
        }
    }
    return q;
}

}  // namespace

PhaseImage unwrap_phase(const PhaseImage& wrapped, const std::optional<RealImage>& quality) {
    wrapped.validate();
    RealImage q = quality ? *quality : smoothness_quality(wrapped);
    require(q.width == wrapped.width && q.height == wrapped.height, "quality map dimensions differ from the phase");
    q.validate();

    constexpr double two_pi = 2.0 * std::numbers::pi;
    const int w = wrapped.width, h = wrapped.height;
    const std::size_t n = wrapped.size();
    PhaseImage out = wrapped;
    std::vector<std::uint8_t> settled(n, 0);

    std::size_t seed = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (q.values[i] > q.values[seed]) seed = i;

    std::priority_queue<Frontier, std::vector<Frontier>, FrontierOrder> heap;
    auto push_neighbors = [&](std::size_t i) {
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (!settled[j]) heap.push({q.values[j], j, i});
        }
    };

    settled[seed] = 1;
    push_neighbors(seed);
    while (!heap.empty()) {
        const Frontier f = heap.top();
        heap.pop();
        if (settled[f.index]) continue;
        const double base = wrapped.values[f.index];
        const double k = std::round((out.values[f.from] - base) / two_pi);
        // One rounding: when `wrapped` came from wrapping a double s, this
        // rebuilds s exactly, so wrapping the output gives `wrapped` back bit for bit.
        out.values[f.index] = std::fma(k, two_pi, base);
        settled[f.index] = 1;
        push_neighbors(f.index);
    }
    return out;
}

}  // namespace odtqc
