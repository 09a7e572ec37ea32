#include "fft.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"

namespace odtqc::fft {
namespace {

struct Plan {
    std::vector<std::size_t> bitrev;
    std::vector<cplx> twiddle;  // exp(-2 pi i k / n), k < n/2
};

const Plan& plan_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, Plan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Plan p;
    p.bitrev.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        p.bitrev[i] = r;
    }
    p.twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        p.twiddle[k] = {std::cos(a), std::sin(a)};
    }
    return cache.emplace(n, std::move(p)).first->second;
}

void check_size(std::size_t n) {
    if (!is_power_of_two(n))
        fail_invalid("FFT dimension " + std::to_string(n) + " is not a power of two");
}

// Unnormalized in-place Cooley-Tukey.
void raw_1d(cplx* data, std::size_t n, Direction dir) {
    if (n == 1) return;
    const Plan& p = plan_for(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = p.bitrev[i];
        if (i < j) std::swap(data[i], data[j]);
    }
    const bool inv = dir == Direction::inverse;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = p.twiddle[k * step];
                if (inv) w = std::conj(w);
                const cplx t = w * data[start + k + half];
                data[start + k + half] = data[start + k] - t;
                data[start + k] += t;
            }
        }
    }
}

void strided_pass(cplx* data, std::size_t n, std::size_t stride, std::size_t count, std::size_t outer_stride,
                  Direction dir, std::vector<cplx>& scratch) {
    scratch.resize(n);
    for (std::size_t c = 0; c < count; ++c) {
        cplx* base = data + c * outer_stride;
        for (std::size_t i = 0; i < n; ++i) scratch[i] = base[i * stride];
        raw_1d(scratch.data(), n, dir);
        for (std::size_t i = 0; i < n; ++i) base[i * stride] = scratch[i];
    }
}

void scale(std::span<cplx> data, double s) {
    for (auto& v : data) v *= s;
}

}  // namespace

void transform_1d(std::span<cplx> data, Direction dir) {
    check_size(data.size());
    raw_1d(data.data(), data.size(), dir);
    scale(data, 1.0 / std::sqrt(static_cast<double>(data.size())));
}

void transform_2d(std::span<cplx> data, std::size_t width, std::size_t height, Direction dir) {
    check_size(width);
    check_size(height);
    if (data.size() != width * height) fail_invalid("FFT buffer size does not match dimensions");
    for (std::size_t y = 0; y < height; ++y) raw_1d(data.data() + y * width, width, dir);
    std::vector<cplx> scratch;
    strided_pass(data.data(), height, width, width, 1, dir, scratch);
    scale(data, 1.0 / std::sqrt(static_cast<double>(width * height)));
}

void transform_3d(std::span<cplx> data, std::size_t nx, std::size_t ny, std::size_t nz, Direction dir) {
    check_size(nx);
    check_size(ny);
    check_size(nz);
    if (data.size() != nx * ny * nz) fail_invalid("FFT buffer size does not match dimensions");
    const std::size_t plane = nx * ny;
    for (std::size_t r = 0; r < ny * nz; ++r) raw_1d(data.data() + r * nx, nx, dir);
    std::vector<cplx> scratch;
    for (std::size_t z = 0; z < nz; ++z) strided_pass(data.data() + z * plane, ny, nx, nx, 1, dir, scratch);
    strided_pass(data.data(), nz, plane, plane, 1, dir, scratch);
    scale(data, 1.0 / std::sqrt(static_cast<double>(nx * ny * nz)));
}

void shift_2d(std::span<cplx> data, std::size_t width, std::size_t height) {
    const std::size_t hx = width / 2, hy = height / 2;
    for (std::size_t y = 0; y < hy; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t x2 = (x + hx) % width;
            std::swap(data[y * width + x], data[(y + hy) * width + x2]);
        }
    }
}

void shift_3d(std::span<cplx> data, std::size_t nx, std::size_t ny, std::size_t nz) {
    const std::size_t hz = nz / 2;
    if (nz == 1) {
        shift_2d(data, nx, ny);
        return;
    }
    for (std::size_t z = 0; z < hz; ++z) {
        for (std::size_t y = 0; y < ny; ++y) {
            const std::size_t y2 = (y + ny / 2) % ny;
            for (std::size_t x = 0; x < nx; ++x) {
                const std::size_t x2 = (x + nx / 2) % nx;
                std::swap(data[(z * ny + y) * nx + x], data[((z + hz) * ny + y2) * nx + x2]);
            }
        }
    }
}

void centered_2d(std::span<cplx> data, std::size_t width, std::size_t height, Direction dir) {
    if (dir == Direction::forward) {
        transform_2d(data, width, height, dir);
        shift_2d(data, width, height);
    } else {
        shift_2d(data, width, height);
        transform_2d(data, width, height, dir);
    }
}

void centered_3d(std::span<cplx> data, std::size_t nx, std::size_t ny, std::size_t nz, Direction dir) {
    if (dir == Direction::forward) {
        transform_3d(data, nx, ny, nz, dir);
        shift_3d(data, nx, ny, nz);
    } else {
        shift_3d(data, nx, ny, nz);
        transform_3d(data, nx, ny, nz, dir);
    }
}

}  // namespace odtqc::fft
