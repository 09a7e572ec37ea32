#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "dataset.hpp"
#include "optics.hpp"
#include "rule.hpp"

namespace odtqc {

// Flat key/value run configuration. Files use `key = value` lines; a
// `[section]` header prefixes following keys with `section.`; `#` starts a
// comment. Later assignments override earlier ones.
class RunConfig {
public:
    static RunConfig parse(std::string_view text, const std::string& context = "config");
    static RunConfig load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;

    std::string str(const std::string& key, const std::string& fallback) const;
    std::string require_str(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    long long integer(const std::string& key, long long fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

    // Seed is mandatory: no implicit nondeterminism.
    std::uint64_t seed() const;
    int threads() const;

    const std::map<std::string, std::string>& entries() const { return values_; }
    // Canonical text form (sorted keys), loadable by parse().
    std::string dump() const;

    OpticsConfig optics() const;
    DatasetSpec dataset() const;
    ScanSpec scan() const;
    RuleConfig rule(const OpticsConfig& optics) const;
    TrainConfig training() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace odtqc
