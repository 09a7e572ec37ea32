#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "field.hpp"
#include "rng.hpp"

namespace testing {

inline odtqc::ComplexField2D random_field(int w, int h, std::uint64_t seed, double pitch = 0.16) {
    odtqc::Rng r(seed);
    odtqc::ComplexField2D f(w, h, pitch);
    for (auto& v : f.values) v = {r.normal(), r.normal()};
    return f;
}

inline double max_abs_diff(const std::vector<odtqc::cplx>& a, const std::vector<odtqc::cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<odtqc::cplx>& a) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("odtqc_unit_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing
