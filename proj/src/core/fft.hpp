#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace odtqc {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Radix-2 transforms on contiguous buffers. All transforms are unitary
// (1/sqrt(N) per axis) and operate on natural (origin at index 0) ordering.
// The *_centered variants additionally move DC to index N/2 on output
// (forward) or expect it there on input (inverse).
namespace fft {

enum class Direction { forward, inverse };

void transform_1d(std::span<cplx> data, Direction dir);

// data is row-major, height rows of width samples.
void transform_2d(std::span<cplx> data, std::size_t width, std::size_t height, Direction dir);

// data is z-major: index = (z * ny + y) * nx + x.
void transform_3d(std::span<cplx> data, std::size_t nx, std::size_t ny, std::size_t nz, Direction dir);

// Swap halves along every axis; for even sizes fftshift == ifftshift.
void shift_2d(std::span<cplx> data, std::size_t width, std::size_t height);
void shift_3d(std::span<cplx> data, std::size_t nx, std::size_t ny, std::size_t nz);

void centered_2d(std::span<cplx> data, std::size_t width, std::size_t height, Direction dir);
void centered_3d(std::span<cplx> data, std::size_t nx, std::size_t ny, std::size_t nz, Direction dir);

}  // namespace fft
}  // namespace odtqc
