#include "phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace odtqc {

bool PhantomShape::contains(double x, double y, double z) const {
    const double dx = x - cx, dy = y - cy, dz = z - cz;
    if (kind == ShapeKind::bead) return dx * dx + dy * dy + dz * dz <= radius * radius;
    const double ux = std::cos(orientation), uy = std::sin(orientation);
    const double half = std::max(length / 2.0 - radius, 0.0);
    const double t = std::clamp(dx * ux + dy * uy, -half, half);
    const double px = dx - t * ux, py = dy - t * uy;
    return px * px + py * py + dz * dz <= radius * radius;
}

void PhantomShape::half_extent(double& ex, double& ey, double& ez) const {
    if (kind == ShapeKind::bead) {
        ex = ey = ez = radius;
        return;
    }
    const double half = std::max(length / 2.0 - radius, 0.0);
    ex = half * std::abs(std::cos(orientation)) + radius;
    ey = half * std::abs(std::sin(orientation)) + radius;
    ez = radius;
}

RIVolume make_phantom(const std::vector<PhantomShape>& shapes, const GridSpec& grid, double n_medium) {
    RIVolume vol(grid.nx, grid.ny, grid.nz, grid.voxel_pitch, n_medium);
    const double p = grid.voxel_pitch;
    auto axis_ok = [&](double c, double e, int n) {
        return c - e >= -(n / 2) * p - 1e-12 && c + e <= (n - 1 - n / 2) * p + 1e-12;
    };
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        const auto& sh = shapes[s];
        require(sh.radius >= 0.0, "shape radius must be non-negative");
        require(sh.kind == ShapeKind::bead || sh.length >= 0.0, "rod length must be non-negative");
        require(sh.delta_n > 0.0 && sh.delta_n <= 0.1, "delta_n must lie in (0, 0.1]");
        double ex, ey, ez;
        sh.half_extent(ex, ey, ez);
        if (!axis_ok(sh.cx, ex, grid.nx) || !axis_ok(sh.cy, ey, grid.ny) || !axis_ok(sh.cz, ez, grid.nz))
            fail_invalid("shape " + std::to_string(s) + " exceeds the grid bounds");
    }
    for (int z = 0; z < grid.nz; ++z) {
        const double zc = (z - grid.nz / 2) * p;
        for (int y = 0; y < grid.ny; ++y) {
            const double yc = (y - grid.ny / 2) * p;
            for (int x = 0; x < grid.nx; ++x) {
                const double xc = (x - grid.nx / 2) * p;
                for (const auto& sh : shapes) {
                    if (sh.radius > 0.0 && sh.contains(xc, yc, zc))
                        vol.at(x, y, z) = std::max(vol.at(x, y, z), n_medium + sh.delta_n);
                }
            }
        }
    }
    return vol;
}

std::vector<PhantomShape> random_specimen(std::uint64_t seed, const GridSpec& grid, double fov) {
    Rng rng(seed);
    const int count = 1 + static_cast<int>(rng.below(3));
    const double zlim = (grid.nz / 2 - 1) * grid.voxel_pitch;
    std::vector<PhantomShape> shapes;
    for (int i = 0; i < count; ++i) {
        PhantomShape s;
        s.delta_n = rng.uniform(0.01, 0.03);
        if (rng.uniform() < 0.5) {
            s.kind = ShapeKind::bead;
            s.radius = std::min(rng.uniform(0.8, 1.8), zlim - grid.voxel_pitch);
        } else {
            s.kind = ShapeKind::rod;
            s.radius = std::min(rng.uniform(0.4, 0.6), zlim - grid.voxel_pitch);
            s.length = rng.uniform(2.0, 4.0);
            s.orientation = rng.uniform(0.0, std::numbers::pi);
        }
        double ex, ey, ez;
        s.half_extent(ex, ey, ez);
        const double lim_x = std::max(fov / 2.0 - ex, 0.0);
        const double lim_y = std::max(fov / 2.0 - ey, 0.0);
        s.cx = rng.uniform(-lim_x, lim_x);
        s.cy = rng.uniform(-lim_y, lim_y);
        s.cz = 0.0;
        shapes.push_back(s);
    }
    return shapes;
}

}  // namespace odtqc
