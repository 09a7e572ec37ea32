#pragma once

#include <vector>

#include "field.hpp"
#include "optics.hpp"

namespace odtqc {

enum class Label { clean = 0, noisy = 1 };

const char* label_name(Label l);
Label parse_label(const std::string& s);

// Fourier-peak screening rule.
struct RuleConfig {
    double mask_radius = 0.0;  // rad/um
    Vec2 mask_center;          // rad/um
    double threshold = 3.306;  // log10 magnitude

    void validate() const;
};

inline constexpr double kPresetRuleThreshold = 3.306;
inline constexpr double kRuleLogFloor = 1e-12;

// Mask radius half the detection pupil, centered on DC (where the illumination
// of a background-normalized field lands).
RuleConfig default_rule_config(const OpticsConfig& optics);

// max over bins outside the mask disk of log10(|FFT| + 1e-12).
double rule_score(const ComplexField2D& field, const RuleConfig& config);

// noisy iff score > threshold.
Label rule_classify(const ComplexField2D& field, const RuleConfig& config);
Label rule_decide(double score, double threshold);

// Threshold maximizing balanced accuracy over the given scores; candidates are
// midpoints between consecutive distinct scores (plus both ends). Ties go to
// the smallest threshold.
double calibrate_threshold(const std::vector<double>& scores, const std::vector<Label>& truth);

}  // namespace odtqc
