#pragma once

#include <cstdint>
#include <vector>

#include "field.hpp"
#include "optics.hpp"
#include "volume.hpp"

namespace odtqc {

// Running sum of deposited 3D spectrum samples (DC-centered layout) with the
// number of deposits per voxel.
struct SpectrumAccumulator {
    int nx = 0, ny = 0, nz = 0;
    double pitch = 0.0;
    std::vector<cplx> sum;
    std::vector<std::uint32_t> hits;
    std::size_t skipped = 0;  // samples whose K fell outside the grid

    SpectrumAccumulator() = default;
    SpectrumAccumulator(int nx_, int ny_, int nz_, double pitch_);
    std::size_t filled() const;
};

// ln|u| + i unwrap(arg u), unwrapped with the amplitude as quality. Amplitudes
// below 1e-6 are clamped; the number clamped is reported through `clamped`.
ComplexField2D rytov_transform(const ComplexField2D& field, std::size_t* clamped = nullptr);

// Deposits F(K) = U_R(bin) / (i * coupling) for every in-pupil bin of u_R.
void map_to_ewald(const ComplexField2D& u_rytov, const WaveVector& k_in, SpectrumAccumulator& acc,
                  const OpticsConfig& config);

// Hit-count-averaged spectrum; unfilled voxels are zero.
ComplexVolume averaged_spectrum(const SpectrumAccumulator& acc);

// Inverse 3D FFT of the averaged spectrum, real part, then
// n = sqrt(max(n_m^2 + F / k0^2, 1)).
RIVolume finalize_tomogram(const SpectrumAccumulator& acc, const OpticsConfig& config);

// Fields are accumulated in a canonical order (by illumination vector) so the
// result does not depend on input order.
RIVolume reconstruct_tomogram(const std::vector<ComplexField2D>& fields, const std::vector<WaveVector>& k_in,
                              const OpticsConfig& config, int depth_voxels, int threads = 1,
                              SpectrumAccumulator* accumulator_out = nullptr);

// Half-open voxel box.
struct VoxelBox {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0, z0 = 0, z1 = 0;
};

// Corner column [0, nx/4) x [0, ny/4) x [0, nz): outside the central specimen
// window for the default geometry.
VoxelBox default_background_box(const RIVolume& volume);

// Population standard deviation of the RI values in the box.
double background_sd(const RIVolume& volume, const VoxelBox& box);

}  // namespace odtqc
