#include "field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace odtqc {

ComplexField2D::ComplexField2D(int w, int h, double pitch, cplx fill)
    : width(w), height(h), pixel_pitch(pitch) {
    require(w > 0 && h > 0, "field dimensions must be positive");
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

ComplexField2D::ComplexField2D(int w, int h, double pitch, std::vector<cplx> v)
    : width(w), height(h), pixel_pitch(pitch), values(std::move(v)) {
    validate();
}

void ComplexField2D::validate() const {
    require(width > 0 && height > 0, "field dimensions must be positive");
    require(values.size() == static_cast<std::size_t>(width) * height, "field value count does not match dimensions");
    require(pixel_pitch > 0.0 && std::isfinite(pixel_pitch), "pixel pitch must be positive");
    for (const auto& v : values)
        require(std::isfinite(v.real()) && std::isfinite(v.imag()), "field contains non-finite values");
}

RealImage::RealImage(int w, int h, double fill) : width(w), height(h) {
    require(w > 0 && h > 0, "image dimensions must be positive");
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

RealImage::RealImage(int w, int h, std::vector<double> v) : width(w), height(h), values(std::move(v)) {
    validate();
}

void RealImage::validate() const {
    require(width > 0 && height > 0, "image dimensions must be positive");
    require(values.size() == static_cast<std::size_t>(width) * height, "image value count does not match dimensions");
    for (double v : values) require(std::isfinite(v), "image contains non-finite values");
}

double frequency_pitch(int n, double pixel_pitch) {
    return 2.0 * std::numbers::pi / (static_cast<double>(n) * pixel_pitch);
}

Spectrum2D fft2_forward(const ComplexField2D& field) {
    field.validate();
    Spectrum2D s;
    s.width = field.width;
    s.height = field.height;
    s.freq_pitch_x = frequency_pitch(field.width, field.pixel_pitch);
    s.freq_pitch_y = frequency_pitch(field.height, field.pixel_pitch);
    s.values = field.values;
    fft::centered_2d(s.values, s.width, s.height, fft::Direction::forward);
    return s;
}

ComplexField2D fft2_inverse(const Spectrum2D& spectrum) {
    require(spectrum.freq_pitch_x > 0.0, "spectrum frequency pitch must be positive");
    ComplexField2D f;
    f.width = spectrum.width;
    f.height = spectrum.height;
    f.pixel_pitch = 2.0 * std::numbers::pi / (spectrum.freq_pitch_x * spectrum.width);
    f.values = spectrum.values;
    fft::centered_2d(f.values, f.width, f.height, fft::Direction::inverse);
    return f;
}

double wrap_phase(double phase) {
    require(std::isfinite(phase), "cannot wrap a non-finite phase");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(phase, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

PhaseImage wrap_phase(const PhaseImage& phase) {
    PhaseImage out = phase;
    for (double& v : out.values) v = wrap_phase(v);
    return out;
}

namespace {

void check_crop(int width, int height, int size) {
    require(size > 0, "crop size must be positive");
    if (size > width || size > height)
        fail_invalid("crop size " + std::to_string(size) + " exceeds source " + std::to_string(width) + "x" +
                     std::to_string(height));
    require((width - size) % 2 == 0 && (height - size) % 2 == 0,
            "crop size and source dimensions must share parity for a centered window");
}

template <typename Image>
Image crop_impl(const Image& src, int size, Image out) {
    const int x0 = (src.width - size) / 2;
    const int y0 = (src.height - size) / 2;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) out.at(x, y) = src.at(x0 + x, y0 + y);
    return out;
}

}  // namespace

PhaseImage center_crop(const PhaseImage& image, int size) {
    check_crop(image.width, image.height, size);
    return crop_impl(image, size, PhaseImage(size, size));
}

ComplexField2D center_crop(const ComplexField2D& field, int size) {
    check_crop(field.width, field.height, size);
    return crop_impl(field, size, ComplexField2D(size, size, field.pixel_pitch));
}

PhaseImage amplitude_of(const ComplexField2D& field) {
    PhaseImage out(field.width, field.height);
    for (std::size_t i = 0; i < field.size(); ++i) out.values[i] = std::abs(field.values[i]);
    return out;
}

PhaseImage wrapped_phase_of(const ComplexField2D& field) {
    PhaseImage out(field.width, field.height);
    for (std::size_t i = 0; i < field.size(); ++i) {
        double a = std::arg(field.values[i]);  // [-pi, pi]
        if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
        out.values[i] = a;
    }
    return out;
}

}  // namespace odtqc
