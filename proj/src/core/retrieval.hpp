#pragma once

#include <optional>

#include "field.hpp"

namespace odtqc {

// Fourier-transform fringe analysis. With holograms formed as
// |u + R exp(i q.r)|^2 the u R term sits at -carrier; that sideband (radius
// crop_radius) is cut out, moved to DC by a whole-bin shift and inverted.
ComplexField2D retrieve_field(const RealImage& hologram, double pixel_pitch, Vec2 carrier, double crop_radius);

// Pointwise sample / background.
ComplexField2D normalize_background(const ComplexField2D& sample, const ComplexField2D& background);

// Quality-guided flood-fill unwrapping. The seed (highest-quality pixel) keeps
// its wrapped value; every other pixel is wrapped + 2 pi k with k chosen to
// minimize the jump to the settled neighbor that reached it.
PhaseImage unwrap_phase(const PhaseImage& wrapped, const std::optional<RealImage>& quality = std::nullopt);

}  // namespace odtqc
