#include "simulate.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace odtqc {

PotentialSpectrum potential_spectrum(const RIVolume& phantom, const OpticsConfig& config) {
    config.validate();
    phantom.validate();
    require(std::abs(phantom.n_medium - config.n_medium) < 1e-12, "phantom medium index differs from the optics");
    PotentialSpectrum out;
    out.pitch = phantom.voxel_pitch;
    out.n_medium = phantom.n_medium;
    out.spectrum = ComplexVolume(phantom.nx, phantom.ny, phantom.nz);
    const double k02 = config.k0() * config.k0();
    const double nm2 = phantom.n_medium * phantom.n_medium;
    for (std::size_t i = 0; i < phantom.size(); ++i) {
        const double n = phantom.values[i];
        out.spectrum.values[i] = k02 * (n * n - nm2);
    }
    fft::centered_3d(out.spectrum.values, phantom.nx, phantom.ny, phantom.nz, fft::Direction::forward);
    return out;
}

ComplexField2D rytov_field(const PotentialSpectrum& potential, const WaveVector& k_in, const OpticsConfig& config) {
    const auto& vol = potential.spectrum;
    if (vol.nx != config.detector_pixels || vol.ny != config.detector_pixels)
        fail_invalid("phantom transverse grid does not match the detector");
    if (std::abs(potential.pitch - config.pixel_pitch) > 1e-12)
        fail_invalid("phantom voxel pitch does not match the detector pixel pitch");
    const EwaldCap cap = ewald_cap(k_in, config, vol.nx, vol.ny, vol.nz, potential.pitch);

    Spectrum2D spec;
    spec.width = vol.nx;
    spec.height = vol.ny;
    spec.freq_pitch_x = frequency_pitch(vol.nx, potential.pitch);
    spec.freq_pitch_y = frequency_pitch(vol.ny, potential.pitch);
    spec.values.assign(static_cast<std::size_t>(vol.nx) * vol.ny, cplx{});
    for (const auto& s : cap.samples) {
        const double c = rytov_coupling(s.kz_scattered, potential.pitch, vol.nz);
        spec.values[s.field_index] = cplx(0.0, c * s.focus_sign) * vol.values[s.voxel_index];
    }
    return fft2_inverse(spec);
}

ComplexField2D simulate_field(const PotentialSpectrum& potential, const WaveVector& k_in,
                              const OpticsConfig& config) {
    ComplexField2D u = rytov_field(potential, k_in, config);
    for (auto& v : u.values) v = std::exp(v);
    return u;
}

ComplexField2D simulate_field(const RIVolume& phantom, const WaveVector& k_in, const OpticsConfig& config) {
    return simulate_field(potential_spectrum(phantom, config), k_in, config);
}

cplx plane_wave(Vec2 q, double phase, int x, int y, double pitch) {
    return std::polar(1.0, q.x * x * pitch + q.y * y * pitch + phase);
}

RealImage synthesize_hologram(const ComplexField2D& field, Vec2 carrier, double ref_amplitude) {
    field.validate();
    require(ref_amplitude >= 0.0 && std::isfinite(ref_amplitude), "reference amplitude must be non-negative");
    const double nyquist = std::numbers::pi / field.pixel_pitch;
    if (std::hypot(carrier.x, carrier.y) > (2.0 / 3.0) * nyquist)
        fail_invalid("carrier frequency exceeds 2/3 of Nyquist; sidebands would alias");
    RealImage out(field.width, field.height);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x)
            out.at(x, y) = std::norm(field.at(x, y) + ref_amplitude * plane_wave(carrier, 0.0, x, y, field.pixel_pitch));
    return out;
}

}  // namespace odtqc
