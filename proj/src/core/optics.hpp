#pragma once

#include <cstddef>
#include <vector>

namespace odtqc {

// Acquisition optics. Defaults follow the 532 nm, NA 0.7 / NA 0.8 system with a
// 256-pixel detector at 0.16 um pitch.
struct OpticsConfig {
    double wavelength = 0.532;  // um
    double n_medium = 1.337;
    double na_illumination = 0.7;
    double na_detection = 0.8;
    int detector_pixels = 256;
    double pixel_pitch = 0.16;  // um
    int num_angles = 71;

    void validate() const;

    double k0() const;             // 2 pi / lambda
    double k_medium() const;       // 2 pi n_m / lambda
    double pupil_radius() const;   // 2 pi NA_det / lambda
    double illumination_radius() const;
};

struct WaveVector {
    double kx = 0.0;
    double ky = 0.0;
    double kz = 0.0;
};

// Normal incidence first, then num_angles - 1 vectors equally spaced in
// azimuth on the illumination cone, starting at azimuth 0.
std::vector<WaveVector> illumination_set(const OpticsConfig& config);

// One sample of the Ewald cap shared by the forward model and the
// reconstruction: a frequency bin of the background-normalized 2D field and
// the 3D spectrum voxel it corresponds to.
struct EwaldSample {
    std::size_t field_index;  // into a DC-centered nx*ny spectrum
    std::size_t voxel_index;  // into a DC-centered nx*ny*nz spectrum
    double kz_scattered;      // rad/um, > 0
    double focus_sign;        // (-1)^mz: puts the detection plane at the central z slice
};

struct EwaldCap {
    std::vector<EwaldSample> samples;
    std::size_t skipped = 0;  // in-pupil bins whose K fell outside the 3D grid
    int shift_x = 0;          // illumination snapped to whole frequency bins
    int shift_y = 0;
    double kz_in = 0.0;
};

// The normalized field's bin (mx, my) carries scattered wave vector
// k_s = ((mx + sx) dk, (my + sy) dk, kz_s) where (sx, sy) is k_in snapped to the
// grid; K = k_s - k_in then lands exactly on transverse bin (mx, my) and is
// snapped to the nearest axial bin mz. The field is referenced to the central
// z slice, which multiplies the sample by focus_sign.
EwaldCap ewald_cap(const WaveVector& k_in, const OpticsConfig& config, int nx, int ny, int nz, double pitch);

// Discrete first-order Rytov coupling: U_R(bin) = i * rytov_coupling * F(K), with
// both spectra unitary-normalized.
double rytov_coupling(double kz_scattered, double pitch, int nz);

}  // namespace odtqc
