#pragma once

#include <cstdint>
#include <vector>

#include "tensor.hpp"

namespace odtqc {

// Random elastic deformation: per-pixel displacements ~ U(-1, 1), smoothed by a
// Gaussian of std `sigma` pixels and scaled by `alpha` pixels, then bilinear
// resampling with edge clamping. All channels share one displacement field.
Tensor elastic_transform(const Tensor& image, double alpha, double sigma, std::uint64_t seed);

// Separable Gaussian blur with edge replication, kernel radius ceil(4 sigma).
std::vector<double> gaussian_blur(const std::vector<double>& src, int width, int height, double sigma);

// Bilinear sample at fractional (x, y), coordinates clamped to the image.
double bilinear_sample(const double* img, int width, int height, double x, double y);

}  // namespace odtqc
