#pragma once

#include <cstdint>
#include <vector>

#include "volume.hpp"

namespace odtqc {

enum class ShapeKind { bead, rod };

// Rods are capsules lying in the transverse plane: total tip-to-tip length
// `length`, cross-section radius `radius`, long axis at `orientation` radians
// from +x. Centers are in um relative to the grid center.
struct PhantomShape {
    ShapeKind kind = ShapeKind::bead;
    double radius = 1.0;
    double length = 0.0;
    double orientation = 0.0;
    double cx = 0.0, cy = 0.0, cz = 0.0;
    double delta_n = 0.02;

    bool contains(double x, double y, double z) const;
    // Half-extent of the axis-aligned bounding box.
    void half_extent(double& ex, double& ey, double& ez) const;
};

struct GridSpec {
    int nx = 64, ny = 64, nz = 64;
    double voxel_pitch = 0.16;
};

// Voxels inside any shape get n_medium + delta_n (largest delta wins where
// shapes overlap); the rest stay at n_medium.
RIVolume make_phantom(const std::vector<PhantomShape>& shapes, const GridSpec& grid, double n_medium);

// Random weakly scattering specimen (1-3 beads or rods) kept inside the central
// `fov` um of the transverse plane.
std::vector<PhantomShape> random_specimen(std::uint64_t seed, const GridSpec& grid, double fov);

}  // namespace odtqc
