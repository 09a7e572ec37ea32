#pragma once

#include <cstdint>

#include "field.hpp"

namespace odtqc {

enum class NoiseKind { fringe, broken };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::fringe;
    double fringe_amplitude = 0.0;  // relative to a unit background
    Vec2 fringe_freq;               // rad/um
    double fringe_phase = 0.0;
    double broken_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    // Magnitude at or above which a record is labeled noisy.
    bool above_threshold() const;
};

inline constexpr double kFringeLabelThreshold = 0.05;
inline constexpr double kBrokenLabelThreshold = 0.02;

// u + a exp(i (q.r + phi0)).
ComplexField2D inject_fringe_noise(const ComplexField2D& field, const NoiseSpec& spec);

// Phase-unwrapping failure signature: a seeded sector (about the field center)
// or blob covering
// round(fraction * N) pixels gets a smooth random phase and its amplitude
// scaled by a seeded factor in [0, 0.2]. The defect fades in over a few pixels
// from the region edge and the field border; with full coverage it is applied
// at full strength everywhere.
ComplexField2D inject_broken_phase(const ComplexField2D& field, const NoiseSpec& spec);

// The region inject_broken_phase would corrupt, 1 = affected.
std::vector<std::uint8_t> broken_region_mask(int width, int height, const NoiseSpec& spec);

ComplexField2D inject_noise(const ComplexField2D& field, const NoiseSpec& spec);

}  // namespace odtqc
