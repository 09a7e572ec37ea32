#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "noise.hpp"
#include "optics.hpp"
#include "phantom.hpp"
#include "rule.hpp"

namespace odtqc {

enum class Split { train, test };

struct LabeledFieldRecord {
    std::string path;  // relative to the manifest directory
    Label label = Label::clean;
    std::optional<NoiseSpec> noise;
    int angle_index = 0;
    WaveVector illumination;
    std::uint64_t seed = 0;
    Split split = Split::train;

    std::string kind_name() const;
};

struct DatasetSpec {
    OpticsConfig optics;
    int depth_voxels = 32;  // axial size of the phantom grid
    int count = 100;
    double fringe_fraction = 0.25;
    double broken_fraction = 0.25;
    bool balance = true;
    double test_fraction = 0.25;
    int phantom_pool = 8;
    double specimen_fov = 12.0;  // um; specimens stay inside this central window
    double fringe_amplitude_min = 0.15, fringe_amplitude_max = 1.0;
    double fringe_freq_min = 6.0, fringe_freq_max = 16.0;  // rad/um
    double broken_min = 0.1, broken_max = 0.6;
    std::uint64_t seed = 1;

    void validate() const;
};

// Per-kind record counts implied by a DatasetSpec: {clean, fringe, broken}.
struct KindCounts {
    int clean = 0, fringe = 0, broken = 0;
};
KindCounts dataset_counts(const DatasetSpec& spec);

// Record metadata only (no simulation, no I/O).
std::vector<LabeledFieldRecord> plan_dataset(const DatasetSpec& spec);

// Simulates every planned record, writes fields/<name>.ofc plus manifest.jsonl
// under out_dir and returns the records.
std::vector<LabeledFieldRecord> generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir,
                                                 int threads = 1);

// One specimen seen under every illumination angle of the optics config, with
// `noisy_angles` of them (a seeded choice) corrupted by fringe noise.
struct ScanSpec {
    OpticsConfig optics;
    int depth_voxels = 32;
    double specimen_fov = 12.0;
    std::vector<PhantomShape> shapes;  // empty: a random specimen
    int noisy_angles = 17;
    double fringe_amplitude_min = 0.5, fringe_amplitude_max = 1.0;
    double fringe_freq_min = 6.0, fringe_freq_max = 16.0;
    std::uint64_t seed = 1;

    void validate() const;
};

RIVolume scan_phantom(const ScanSpec& spec);
std::vector<LabeledFieldRecord> plan_scan(const ScanSpec& spec);
// Writes fields/angle_<i>.ofc and manifest.jsonl; records are in angle order.
std::vector<LabeledFieldRecord> generate_scan(const ScanSpec& spec, const std::filesystem::path& out_dir,
                                              int threads = 1);

// JSON-lines manifest with keys path, label, kind, fringe_amplitude,
// fringe_freq, broken_fraction, angle_index, k_in, seed, split.
std::string encode_manifest(const std::vector<LabeledFieldRecord>& records);
std::vector<LabeledFieldRecord> decode_manifest(std::string_view text, const std::string& context = "manifest");
void save_manifest(const std::filesystem::path& path, const std::vector<LabeledFieldRecord>& records);
std::vector<LabeledFieldRecord> load_manifest(const std::filesystem::path& path);

}  // namespace odtqc
