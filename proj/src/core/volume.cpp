#include "volume.hpp"

#include <cmath>

#include "error.hpp"

namespace odtqc {

RIVolume::RIVolume(int nx_, int ny_, int nz_, double pitch, double medium)
    : nx(nx_), ny(ny_), nz(nz_), voxel_pitch(pitch), n_medium(medium) {
    require(nx > 0 && ny > 0 && nz > 0, "volume dimensions must be positive");
    values.assign(static_cast<std::size_t>(nx) * ny * nz, medium);
    validate();
}

void RIVolume::validate() const {
    require(nx > 0 && ny > 0 && nz > 0, "volume dimensions must be positive");
    require(values.size() == static_cast<std::size_t>(nx) * ny * nz, "volume value count does not match dimensions");
    require(voxel_pitch > 0.0 && std::isfinite(voxel_pitch), "voxel pitch must be positive");
    require(std::isfinite(n_medium) && n_medium >= 1.0, "medium index must be finite and >= 1");
    for (double v : values) require(std::isfinite(v) && v >= 1.0, "volume values must be finite and >= 1");
}

}  // namespace odtqc
