#include "optics.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace odtqc {

void OpticsConfig::validate() const {
    require(wavelength > 0.0 && std::isfinite(wavelength), "wavelength must be positive");
    require(n_medium >= 1.0 && std::isfinite(n_medium), "medium index must be >= 1");
    require(na_illumination > 0.0, "illumination NA must be positive");
    require(na_illumination <= na_detection, "illumination NA must not exceed detection NA");
    require(na_detection < n_medium, "detection NA must be below the medium index");
    require(detector_pixels > 0, "detector pixel count must be positive");
    require(pixel_pitch > 0.0 && std::isfinite(pixel_pitch), "pixel pitch must be positive");
    require(num_angles >= 1, "at least one illumination angle is required");
}

double OpticsConfig::k0() const { return 2.0 * std::numbers::pi / wavelength; }
double OpticsConfig::k_medium() const { return k0() * n_medium; }
double OpticsConfig::pupil_radius() const { return k0() * na_detection; }
double OpticsConfig::illumination_radius() const { return k0() * na_illumination; }

std::vector<WaveVector> illumination_set(const OpticsConfig& config) {
    config.validate();
    const double km = config.k_medium();
    const double kt = config.illumination_radius();
    std::vector<WaveVector> out;
    out.reserve(static_cast<std::size_t>(config.num_angles));
    out.push_back({0.0, 0.0, km});
    const int cone = config.num_angles - 1;
    for (int i = 0; i < cone; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / cone;
        WaveVector k;
        k.kx = kt * std::cos(phi);
        k.ky = kt * std::sin(phi);
        k.kz = std::sqrt(km * km - kt * kt);
        out.push_back(k);
    }
    return out;
}

EwaldCap ewald_cap(const WaveVector& k_in, const OpticsConfig& config, int nx, int ny, int nz, double pitch) {
    config.validate();
    require(nx > 0 && ny > 0 && nz > 0, "grid dimensions must be positive");
    const double km = config.k_medium();
    const double dkx = 2.0 * std::numbers::pi / (nx * pitch);
    const double dky = 2.0 * std::numbers::pi / (ny * pitch);
    const double dkz = 2.0 * std::numbers::pi / (nz * pitch);
    const double pupil2 = config.pupil_radius() * config.pupil_radius();

    EwaldCap cap;
    cap.shift_x = static_cast<int>(std::lround(k_in.kx / dkx));
    cap.shift_y = static_cast<int>(std::lround(k_in.ky / dky));
    const double kin_x = cap.shift_x * dkx;
    const double kin_y = cap.shift_y * dky;
    const double kin_t2 = kin_x * kin_x + kin_y * kin_y;
    if (kin_t2 >= km * km) fail_invalid("illumination vector is evanescent in the medium");
    cap.kz_in = std::sqrt(km * km - kin_t2);

    for (int iy = 0; iy < ny; ++iy) {
        const int my = iy - ny / 2;
        const double ksy = (my + cap.shift_y) * dky;
        for (int ix = 0; ix < nx; ++ix) {
            const int mx = ix - nx / 2;
            const double ksx = (mx + cap.shift_x) * dkx;
            const double kt2 = ksx * ksx + ksy * ksy;
            if (kt2 > pupil2) continue;
            if (kt2 >= km * km) fail_internal("evanescent scattered wave inside the detection pupil");
            const double kzs = std::sqrt(km * km - kt2);
            const int mz = static_cast<int>(std::lround((kzs - cap.kz_in) / dkz));
            if (mz < -nz / 2 || mz >= nz - nz / 2) {
                ++cap.skipped;
                continue;
            }
            const int iz = mz + nz / 2;
            cap.samples.push_back({static_cast<std::size_t>(iy) * nx + ix,
                                   (static_cast<std::size_t>(iz) * ny + iy) * nx + ix, kzs,
                                   (mz % 2 == 0) ? 1.0 : -1.0});
        }
    }
    return cap;
}

double rytov_coupling(double kz_scattered, double pitch, int nz) {
    return pitch * std::sqrt(static_cast<double>(nz)) / (2.0 * kz_scattered);
}

}  // namespace odtqc
