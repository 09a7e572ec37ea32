#include "noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "error.hpp"
#include "rng.hpp"
#include "simulate.hpp"

namespace odtqc {

void NoiseSpec::validate() const {
    if (kind == NoiseKind::fringe) {
        require(fringe_amplitude >= 0.0 && fringe_amplitude <= 2.0, "fringe amplitude must lie in [0, 2]");
        require(std::isfinite(fringe_freq.x) && std::isfinite(fringe_freq.y) && std::isfinite(fringe_phase),
                "fringe frequency and phase must be finite");
    } else {
        require(broken_fraction >= 0.0 && broken_fraction <= 1.0, "broken fraction must lie in [0, 1]");
    }
}

bool NoiseSpec::above_threshold() const {
    return kind == NoiseKind::fringe ? fringe_amplitude >= kFringeLabelThreshold
                                     : broken_fraction >= kBrokenLabelThreshold;
}

ComplexField2D inject_fringe_noise(const ComplexField2D& field, const NoiseSpec& spec) {
    require(spec.kind == NoiseKind::fringe, "inject_fringe_noise needs a fringe spec");
    spec.validate();
    ComplexField2D out = field;
    if (spec.fringe_amplitude == 0.0) return out;
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            out.at(x, y) += spec.fringe_amplitude * plane_wave(spec.fringe_freq, spec.fringe_phase, x, y, field.pixel_pitch);
    return out;
}

namespace {

constexpr int kPhaseCell = 32;   // px between random phase nodes
constexpr double kTaper = 24;  // px over which the defect fades in from the region edge

// Region metric: pixels with the `take` smallest values form the region. A
// sector uses angular distance from a direction about the field center, a blob
// the elliptic radius about a point inside the central half of the field.
// `scale` converts metric differences to pixels for the fade-in.
struct RegionMetric {
    std::vector<double> metric;
    std::vector<double> scale;
};

RegionMetric region_metric(int width, int height, const NoiseSpec& spec) {
    Rng rng(derive_seed(spec.seed, 0x62726f6bULL));
    const std::size_t n = static_cast<std::size_t>(width) * height;
    RegionMetric m{std::vector<double>(n), std::vector<double>(n, 1.0)};
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(theta), s = std::sin(theta);
    if (rng.uniform() < 0.5) {
        const double cx = width / 2.0, cy = height / 2.0;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * width + x;
                const double dx = x - cx, dy = y - cy;
                m.metric[i] = std::abs(wrap_phase(std::atan2(dy, dx) - theta));
                m.scale[i] = std::hypot(dx, dy);
            }
    } else {
        const double bx = rng.uniform(0.375, 0.625) * width;
        const double by = rng.uniform(0.375, 0.625) * height;
        const double aspect = rng.uniform(1.0, 2.5);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double dx = x - bx, dy = y - by;
                const double u = c * dx + s * dy, v = -s * dx + c * dy;
                m.metric[static_cast<std::size_t>(y) * width + x] = std::sqrt(u * u + aspect * aspect * v * v);
            }
        }
    }
    return m;
}

std::vector<std::size_t> region_order(const std::vector<double>& metric) {
    std::vector<std::size_t> order(metric.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return metric[a] < metric[b]; });
    return order;
}

// Smooth random phase: uniform node values in (-pi, pi] on a coarse lattice,
// cosine-interpolated in between.
std::vector<double> smooth_random_phase(int width, int height, std::uint64_t seed) {
    const int gx = width / kPhaseCell + 2, gy = height / kPhaseCell + 2;
    Rng rng(seed);
    std::vector<double> nodes(static_cast<std::size_t>(gx) * gy);
    for (double& v : nodes) v = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
    auto ease = [](double t) { return 0.5 - 0.5 * std::cos(std::numbers::pi * t); };
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        const int iy = y / kPhaseCell;
        const double ty = ease(static_cast<double>(y % kPhaseCell) / kPhaseCell);
        for (int x = 0; x < width; ++x) {
            const int ix = x / kPhaseCell;
            const double tx = ease(static_cast<double>(x % kPhaseCell) / kPhaseCell);
            auto node = [&](int a, int b) { return nodes[static_cast<std::size_t>(b) * gx + a]; };
            const double top = node(ix, iy) * (1 - tx) + node(ix + 1, iy) * tx;
            const double bottom = node(ix, iy + 1) * (1 - tx) + node(ix + 1, iy + 1) * tx;
            out[static_cast<std::size_t>(y) * width + x] = top * (1 - ty) + bottom * ty;
        }
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> broken_region_mask(int width, int height, const NoiseSpec& spec) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> mask(n, 0);
    const auto take = static_cast<std::size_t>(std::llround(spec.broken_fraction * static_cast<double>(n)));
    if (take == 0) return mask;
    const auto order = region_order(region_metric(width, height, spec).metric);
    for (std::size_t i = 0; i < take; ++i) mask[order[i]] = 1;
    return mask;
}

ComplexField2D inject_broken_phase(const ComplexField2D& field, const NoiseSpec& spec) {
    require(spec.kind == NoiseKind::broken, "inject_broken_phase needs a broken spec");
    spec.validate();
    ComplexField2D out = field;
    const std::size_t n = field.size();
    const auto take = static_cast<std::size_t>(std::llround(spec.broken_fraction * static_cast<double>(n)));
    if (take == 0) return out;
    const auto region = region_metric(field.width, field.height, spec);
    const auto& metric = region.metric;
    const auto order = region_order(metric);
    // Edge of the region in metric units.
    const double edge = take < n ? 0.5 * (metric[order[take - 1]] + metric[order[take]]) : metric[order[n - 1]] + 0.5;

    Rng rng(derive_seed(spec.seed, 0x70686173ULL));
    const double factor = rng.uniform(0.0, 0.2);
    const auto phase = smooth_random_phase(field.width, field.height, derive_seed(spec.seed, 0x736d6f6fULL));
    for (std::size_t k = 0; k < take; ++k) {
        const std::size_t i = order[k];
        // Fade in from the region edge and from the field border, so the
        // defect adds no step to the periodic spectrum. Full coverage has no edge.
        const int x = static_cast<int>(i % static_cast<std::size_t>(field.width));
        const int y = static_cast<int>(i / static_cast<std::size_t>(field.width));
        const double border = std::min({x, y, field.width - 1 - x, field.height - 1 - y}) + 0.5;
        const double depth = take == n ? 1.0 : std::min(std::min((edge - metric[i]) * region.scale[i] + 0.5, border) / kTaper, 1.0);
        const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * depth);
        const cplx u = field.values[i];
        const double amp = std::abs(u) * (1.0 - w * (1.0 - factor));
        out.values[i] = std::polar(amp, (1.0 - w) * std::arg(u) + w * phase[i]);
    }
    return out;
}

ComplexField2D inject_noise(const ComplexField2D& field, const NoiseSpec& spec) {
    return spec.kind == NoiseKind::fringe ? inject_fringe_noise(field, spec) : inject_broken_phase(field, spec);
}

}  // namespace odtqc
