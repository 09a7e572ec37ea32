#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fft.hpp"

namespace odtqc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// A complex optical field sampled on a regular grid, row-major.
struct ComplexField2D {
    int width = 0;
    int height = 0;
    double pixel_pitch = 1.0;  // micrometers
    std::vector<cplx> values;

    ComplexField2D() = default;
    ComplexField2D(int w, int h, double pitch, cplx fill = {0.0, 0.0});
    ComplexField2D(int w, int h, double pitch, std::vector<cplx> v);

    std::size_t size() const { return values.size(); }
    cplx& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    const cplx& at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    // Throws on any broken invariant (dimensions, pitch, non-finite values).
    void validate() const;
};

// A real image. Used for phase maps, hologram intensities and saliency maps.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0);
    RealImage(int w, int h, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    void validate() const;
};

using PhaseImage = RealImage;

// DC-centered spectrum: bin index i along an axis of length N holds frequency
// (i - N/2) * freq_pitch.
struct Spectrum2D {
    int width = 0;
    int height = 0;
    double freq_pitch_x = 0.0;  // rad / um
    double freq_pitch_y = 0.0;
    std::vector<cplx> values;

    cplx& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    const cplx& at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

Spectrum2D fft2_forward(const ComplexField2D& field);
// pixel_pitch is recovered from freq_pitch_x.
ComplexField2D fft2_inverse(const Spectrum2D& spectrum);

// Frequency pitch of an N-point grid with the given sample spacing.
double frequency_pitch(int n, double pixel_pitch);

// Maps into (-pi, pi].
double wrap_phase(double phase);
PhaseImage wrap_phase(const PhaseImage& phase);

PhaseImage center_crop(const PhaseImage& image, int size);
ComplexField2D center_crop(const ComplexField2D& field, int size);

PhaseImage amplitude_of(const ComplexField2D& field);
PhaseImage wrapped_phase_of(const ComplexField2D& field);

}  // namespace odtqc
