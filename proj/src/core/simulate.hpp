#pragma once

#include "field.hpp"
#include "optics.hpp"
#include "volume.hpp"

namespace odtqc {

// DC-centered unitary 3D spectrum of the scattering potential
// F(r) = k0^2 (n(r)^2 - n_medium^2).
struct PotentialSpectrum {
    ComplexVolume spectrum;
    double pitch = 0.0;
    double n_medium = 0.0;
};

PotentialSpectrum potential_spectrum(const RIVolume& phantom, const OpticsConfig& config);

// First-order Rytov phase u_R of the background-normalized field for one
// illumination; the detected field is exp(u_R).
ComplexField2D rytov_field(const PotentialSpectrum& potential, const WaveVector& k_in, const OpticsConfig& config);

ComplexField2D simulate_field(const PotentialSpectrum& potential, const WaveVector& k_in,
                              const OpticsConfig& config);
ComplexField2D simulate_field(const RIVolume& phantom, const WaveVector& k_in, const OpticsConfig& config);

// Off-axis hologram |u + ref * exp(i q.r)|^2 with r measured from pixel (0, 0).
RealImage synthesize_hologram(const ComplexField2D& field, Vec2 carrier, double ref_amplitude);

// Plane wave exp(i (q.r + phase)) sampled with r measured from pixel (0, 0).
cplx plane_wave(Vec2 q, double phase, int x, int y, double pitch);

}  // namespace odtqc
