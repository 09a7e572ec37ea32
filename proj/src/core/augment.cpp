#include "augment.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace odtqc {

std::vector<double> gaussian_blur(const std::vector<double>& src, int width, int height, double sigma) {
    require(sigma > 0.0, "gaussian sigma must be positive");
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sx = std::clamp(x + i, 0, width - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * src[static_cast<std::size_t>(y) * width + sx];
            }
            tmp[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sy = std::clamp(y + i, 0, height - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[static_cast<std::size_t>(sy) * width + x];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    return out;
}

double bilinear_sample(const double* img, int width, int height, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(std::floor(x)), width - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), height - 1);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0, fy = y - y0;
    const double a = img[static_cast<std::size_t>(y0) * width + x0];
    const double b = img[static_cast<std::size_t>(y0) * width + x1];
    const double c = img[static_cast<std::size_t>(y1) * width + x0];
    const double d = img[static_cast<std::size_t>(y1) * width + x1];
    if (fx == 0.0 && fy == 0.0) return a;
    return (1.0 - fy) * ((1.0 - fx) * a + fx * b) + fy * ((1.0 - fx) * c + fx * d);
}

Tensor elastic_transform(const Tensor& image, double alpha, double sigma, std::uint64_t seed) {
    require(image.shape.size() == 3, "elastic_transform expects a [c, h, w] tensor");
    require(alpha >= 0.0, "elastic alpha must be non-negative");
    require(sigma > 0.0, "elastic sigma must be positive");
    if (alpha == 0.0) return image;
    const int c = image.dim(0), h = image.dim(1), w = image.dim(2);
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    Rng rng(seed);
    std::vector<double> dx(hw), dy(hw);
    for (double& v : dx) v = rng.uniform(-1.0, 1.0);
    for (double& v : dy) v = rng.uniform(-1.0, 1.0);
    dx = gaussian_blur(dx, w, h, sigma);
    dy = gaussian_blur(dy, w, h, sigma);

    Tensor out(image.shape);
    for (int ch = 0; ch < c; ++ch) {
        const double* src = image.values.data() + ch * hw;
        double* dst = out.values.data() + ch * hw;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                dst[i] = bilinear_sample(src, w, h, x + alpha * dx[i], y + alpha * dy[i]);
            }
        }
    }
    return out;
}

}  // namespace odtqc
