#include "rule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace odtqc {

const char* label_name(Label l) { return l == Label::noisy ? "noisy" : "clean"; }

Label parse_label(const std::string& s) {
    if (s == "clean") return Label::clean;
    if (s == "noisy") return Label::noisy;
    fail_invalid("unknown label '" + s + "'");
}

void RuleConfig::validate() const {
    require(mask_radius > 0.0 && std::isfinite(mask_radius), "mask radius must be positive");
    require(std::isfinite(threshold), "rule threshold must be finite");
    require(std::isfinite(mask_center.x) && std::isfinite(mask_center.y), "mask center must be finite");
}

RuleConfig default_rule_config(const OpticsConfig& optics) {
    RuleConfig c;
    c.mask_radius = 0.5 * optics.pupil_radius();
    c.mask_center = {0.0, 0.0};
    c.threshold = kPresetRuleThreshold;
    return c;
}

double rule_score(const ComplexField2D& field, const RuleConfig& config) {
    config.validate();
    const Spectrum2D spec = fft2_forward(field);
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    const double r2 = config.mask_radius * config.mask_radius;
    for (int iy = 0; iy < spec.height; ++iy) {
        const double ky = (iy - spec.height / 2) * spec.freq_pitch_y - config.mask_center.y;
        for (int ix = 0; ix < spec.width; ++ix) {
            const double kx = (ix - spec.width / 2) * spec.freq_pitch_x - config.mask_center.x;
            if (kx * kx + ky * ky <= r2) continue;
            any = true;
            best = std::max(best, std::log10(std::abs(spec.at(ix, iy)) + kRuleLogFloor));
        }
    }
    if (!any) fail_invalid("rule mask covers the whole spectrum; no bins left to scan");
    return best;
}

Label rule_decide(double score, double threshold) { return score > threshold ? Label::noisy : Label::clean; }

Label rule_classify(const ComplexField2D& field, const RuleConfig& config) {
    return rule_decide(rule_score(field, config), config.threshold);
}

double calibrate_threshold(const std::vector<double>& scores, const std::vector<Label>& truth) {
    require(!scores.empty() && scores.size() == truth.size(), "calibration needs equal-length, nonempty inputs");
    std::size_t pos = 0, neg = 0;
    for (Label l : truth) (l == Label::noisy ? pos : neg)++;
    require(pos > 0 && neg > 0, "calibration needs both clean and noisy examples");

    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<double> candidates;
    candidates.push_back(sorted.front() - 1.0);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    candidates.push_back(sorted.back());

    double best_t = candidates.front();
    double best_ba = -1.0;
    for (double t : candidates) {
        std::size_t tp = 0, tn = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const Label p = rule_decide(scores[i], t);
            if (p == Label::noisy && truth[i] == Label::noisy) ++tp;
            if (p == Label::clean && truth[i] == Label::clean) ++tn;
        }
        const double ba = 0.5 * (static_cast<double>(tp) / pos + static_cast<double>(tn) / neg);
        if (ba > best_ba) {
            best_ba = ba;
            best_t = t;
        }
    }
    return best_t;
}

}  // namespace odtqc
