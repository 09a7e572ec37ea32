#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace odtqc {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) fail_invalid("config key '" + key + "': '" + text + "' is not a number");
    return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) fail_invalid("config key '" + key + "': '" + text + "' is not an integer");
    return v;
}

}  // namespace

RunConfig RunConfig::parse(std::string_view text, const std::string& context) {
    RunConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = context + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') fail_invalid(where + ": unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty()) fail_invalid(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_invalid(where + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) fail_invalid(where + ": empty key");
        cfg.set(section.empty() ? key : section + "." + key, trim(std::string_view(line).substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool RunConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::optional<std::string> RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::string RunConfig::require_str(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) fail_invalid("missing required setting '" + key + "'");
    return *v;
}

double RunConfig::num(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_double(key, *v) : fallback;
}

long long RunConfig::integer(const std::string& key, long long fallback) const {
    const auto v = get(key);
    return v ? parse_integer(key, *v) : fallback;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    fail_invalid("config key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<double> RunConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::istringstream in(*v);
    for (std::string item; std::getline(in, item, ',');) out.push_back(parse_double(key, trim(item)));
    return out;
}

std::uint64_t RunConfig::seed() const {
    const auto v = get("seed");
    if (!v) fail_invalid("missing required setting 'seed'");
    const long long s = parse_integer("seed", *v);
    require(s >= 0, "seed must be non-negative");
    return static_cast<std::uint64_t>(s);
}

int RunConfig::threads() const { return resolve_threads(static_cast<int>(integer("threads", 0))); }

std::string RunConfig::dump() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

OpticsConfig RunConfig::optics() const {
    OpticsConfig o;
    o.wavelength = num("optics.wavelength", o.wavelength);
    o.n_medium = num("optics.n_medium", o.n_medium);
    o.na_illumination = num("optics.na_illumination", o.na_illumination);
    o.na_detection = num("optics.na_detection", o.na_detection);
    o.detector_pixels = static_cast<int>(integer("optics.detector_pixels", o.detector_pixels));
    o.pixel_pitch = num("optics.pixel_pitch", o.pixel_pitch);
    o.num_angles = static_cast<int>(integer("optics.num_angles", o.num_angles));
    o.validate();
    return o;
}

DatasetSpec RunConfig::dataset() const {
    DatasetSpec d;
    d.optics = optics();
    d.seed = seed();
    d.depth_voxels = static_cast<int>(integer("dataset.depth_voxels", d.depth_voxels));
    d.count = static_cast<int>(integer("dataset.count", d.count));
    d.fringe_fraction = num("dataset.fringe_fraction", d.fringe_fraction);
    d.broken_fraction = num("dataset.broken_fraction", d.broken_fraction);
    d.balance = flag("dataset.balance", d.balance);
    d.test_fraction = num("dataset.test_fraction", d.test_fraction);
    d.phantom_pool = static_cast<int>(integer("dataset.phantom_pool", d.phantom_pool));
    d.specimen_fov = num("dataset.specimen_fov", d.specimen_fov);
    d.fringe_amplitude_min = num("dataset.fringe_amplitude_min", d.fringe_amplitude_min);
    d.fringe_amplitude_max = num("dataset.fringe_amplitude_max", d.fringe_amplitude_max);
    d.fringe_freq_min = num("dataset.fringe_freq_min", d.fringe_freq_min);
    d.fringe_freq_max = num("dataset.fringe_freq_max", d.fringe_freq_max);
    d.broken_min = num("dataset.broken_min", d.broken_min);
    d.broken_max = num("dataset.broken_max", d.broken_max);
    d.validate();
    return d;
}

ScanSpec RunConfig::scan() const {
    ScanSpec s;
    s.optics = optics();
    s.seed = derive_seed(seed(), 0x7363616eULL);
    s.depth_voxels = static_cast<int>(integer("scan.depth_voxels", s.depth_voxels));
    s.specimen_fov = num("scan.specimen_fov", s.specimen_fov);
    s.noisy_angles = static_cast<int>(integer("scan.noisy_angles", s.noisy_angles));
    s.fringe_amplitude_min = num("scan.fringe_amplitude_min", s.fringe_amplitude_min);
    s.fringe_amplitude_max = num("scan.fringe_amplitude_max", s.fringe_amplitude_max);
    s.fringe_freq_min = num("scan.fringe_freq_min", s.fringe_freq_min);
    s.fringe_freq_max = num("scan.fringe_freq_max", s.fringe_freq_max);
    s.validate();
    return s;
}

RuleConfig RunConfig::rule(const OpticsConfig& o) const {
    RuleConfig r = default_rule_config(o);
    r.threshold = num("rule.threshold", r.threshold);
    r.mask_radius = num("rule.mask_radius", r.mask_radius);
    const auto c = numbers("rule.mask_center", {r.mask_center.x, r.mask_center.y});
    require(c.size() == 2, "rule.mask_center needs two comma-separated values");
    r.mask_center = {c[0], c[1]};
    r.validate();
    return r;
}

TrainConfig RunConfig::training() const {
    TrainConfig t;
    t.seed = seed();
    t.threads = threads();
    t.epochs = static_cast<int>(integer("train.epochs", t.epochs));
    t.batch_size = static_cast<int>(integer("train.batch_size", t.batch_size));
    t.adam.learning_rate = num("train.learning_rate", t.adam.learning_rate);
    t.adam.beta1 = num("train.beta1", t.adam.beta1);
    t.adam.beta2 = num("train.beta2", t.adam.beta2);
    t.adam.epsilon = num("train.epsilon", t.adam.epsilon);
    t.dropout_rates = numbers("train.dropout", t.dropout_rates);
    t.decision_threshold = num("train.decision_threshold", t.decision_threshold);
    t.elastic_alpha = num("train.elastic_alpha", t.elastic_alpha);
    t.elastic_sigma = num("train.elastic_sigma", t.elastic_sigma);
    t.validation_fraction = num("train.validation_fraction", t.validation_fraction);
    if (const auto m = get("train.input_mode")) t.input_mode = parse_input_mode(*m);
    t.validate();
    return t;
}

}  // namespace odtqc
