#pragma once

#include <cstddef>
#include <vector>

#include "fft.hpp"

namespace odtqc {

// Refractive-index volume, z-major (index = (z * ny + y) * nx + x).
// Voxel i along an axis of n voxels sits at coordinate (i - n/2) * voxel_pitch.
struct RIVolume {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    double voxel_pitch = 1.0;  // um
    double n_medium = 1.0;
    std::vector<double> values;

    RIVolume() = default;
    RIVolume(int nx_, int ny_, int nz_, double pitch, double medium);

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny + y) * nx + x;
    }
    double& at(int x, int y, int z) { return values[index(x, y, z)]; }
    double at(int x, int y, int z) const { return values[index(x, y, z)]; }
    std::size_t size() const { return values.size(); }

    void validate() const;
};

// Dense complex 3D array with the same layout as RIVolume.
struct ComplexVolume {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    std::vector<cplx> values;

    ComplexVolume() = default;
    ComplexVolume(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_), values(std::size_t(nx_) * ny_ * nz_) {}

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny + y) * nx + x;
    }
};

}  // namespace odtqc
