#include "dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simulate.hpp"

namespace odtqc {

namespace {

enum class RecordKind { none, fringe, broken };

// The noise phase and noise seed are not stored in the manifest; both derive
// from the record seed.
NoiseSpec noise_from_seed(RecordKind kind, double amplitude, Vec2 freq, double fraction, std::uint64_t record_seed) {
    NoiseSpec n;
    n.kind = kind == RecordKind::fringe ? NoiseKind::fringe : NoiseKind::broken;
    n.fringe_amplitude = kind == RecordKind::fringe ? amplitude : 0.0;
    n.fringe_freq = kind == RecordKind::fringe ? freq : Vec2{};
    n.broken_fraction = kind == RecordKind::broken ? fraction : 0.0;
    n.seed = derive_seed(record_seed, 1);
    Rng r(derive_seed(record_seed, 2));
    n.fringe_phase = kind == RecordKind::fringe ? r.uniform(-std::numbers::pi, std::numbers::pi) : 0.0;
    return n;
}

GridSpec grid_of(const DatasetSpec& spec) {
    return {spec.optics.detector_pixels, spec.optics.detector_pixels, spec.depth_voxels, spec.optics.pixel_pitch};
}

}  // namespace

std::string LabeledFieldRecord::kind_name() const {
    if (!noise) return "none";
    return noise->kind == NoiseKind::fringe ? "fringe" : "broken";
}

void DatasetSpec::validate() const {
    optics.validate();
    require(count >= 2, "dataset count must be at least 2");
    require(fringe_fraction >= 0.0 && broken_fraction >= 0.0, "noise fractions must be non-negative");
    require(fringe_fraction + broken_fraction <= 1.0 + 1e-12, "noise fractions must sum to at most 1");
    require(!balance || fringe_fraction + broken_fraction > 0.0, "a balanced dataset needs a nonzero noise fraction");
    require(test_fraction >= 0.0 && test_fraction < 1.0, "test fraction must lie in [0, 1)");
    require(phantom_pool >= 1, "phantom pool must hold at least one specimen");
    require(depth_voxels >= 1 && is_power_of_two(static_cast<std::size_t>(depth_voxels)),
            "depth voxels must be a power of two");
    require(is_power_of_two(static_cast<std::size_t>(optics.detector_pixels)),
            "detector pixel count must be a power of two");
    require(fringe_amplitude_min >= kFringeLabelThreshold && fringe_amplitude_max <= 2.0 &&
                fringe_amplitude_min <= fringe_amplitude_max,
            "fringe amplitude range must lie in [0.05, 2]");
    require(broken_min >= kBrokenLabelThreshold && broken_max <= 1.0 && broken_min <= broken_max,
            "broken fraction range must lie in [0.02, 1]");
    require(fringe_freq_min > 0.0 && fringe_freq_min <= fringe_freq_max, "fringe frequency range is invalid");
}

KindCounts dataset_counts(const DatasetSpec& spec) {
    KindCounts k;
    if (spec.balance) {
        const int n = spec.count - spec.count % 2;
        const int noisy = n / 2;
        const double share = spec.fringe_fraction / (spec.fringe_fraction + spec.broken_fraction);
        k.fringe = static_cast<int>(std::llround(noisy * share));
        k.broken = noisy - k.fringe;
        k.clean = n - noisy;
    } else {
        k.fringe = static_cast<int>(std::llround(spec.fringe_fraction * spec.count));
        k.broken = std::min(static_cast<int>(std::llround(spec.broken_fraction * spec.count)), spec.count - k.fringe);
        k.clean = spec.count - k.fringe - k.broken;
    }
    return k;
}

std::vector<LabeledFieldRecord> plan_dataset(const DatasetSpec& spec) {
    spec.validate();
    const KindCounts counts = dataset_counts(spec);
    const int n = counts.clean + counts.fringe + counts.broken;

    std::vector<RecordKind> kinds;
    kinds.insert(kinds.end(), static_cast<std::size_t>(counts.clean), RecordKind::none);
    kinds.insert(kinds.end(), static_cast<std::size_t>(counts.fringe), RecordKind::fringe);
    kinds.insert(kinds.end(), static_cast<std::size_t>(counts.broken), RecordKind::broken);
    Rng(derive_seed(spec.seed, 0x6b696e64ULL)).shuffle(kinds.begin(), kinds.end());

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng(derive_seed(spec.seed, 0x73706c74ULL)).shuffle(order.begin(), order.end());
    const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * n));
    std::vector<Split> split(static_cast<std::size_t>(n), Split::train);
    for (std::size_t i = 0; i < n_test; ++i) split[order[i]] = Split::test;

    const auto angles = illumination_set(spec.optics);
    std::vector<LabeledFieldRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        LabeledFieldRecord rec;
        rec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i), 0x726563ULL);
        Rng r(rec.seed);
        r.below(static_cast<std::uint64_t>(spec.phantom_pool));  // specimen choice, see specimen_of()
        rec.angle_index = static_cast<int>(r.below(static_cast<std::uint64_t>(angles.size())));
        rec.illumination = angles[static_cast<std::size_t>(rec.angle_index)];
        const RecordKind kind = kinds[static_cast<std::size_t>(i)];
        if (kind == RecordKind::fringe) {
            const double a = r.uniform(spec.fringe_amplitude_min, spec.fringe_amplitude_max);
            const double q = r.uniform(spec.fringe_freq_min, spec.fringe_freq_max);
            const double dir = r.uniform(0.0, 2.0 * std::numbers::pi);
            rec.noise = noise_from_seed(kind, a, {q * std::cos(dir), q * std::sin(dir)}, 0.0, rec.seed);
        } else if (kind == RecordKind::broken) {
            rec.noise = noise_from_seed(kind, 0.0, {}, r.uniform(spec.broken_min, spec.broken_max), rec.seed);
        }
        rec.label = (rec.noise && rec.noise->above_threshold()) ? Label::noisy : Label::clean;
        rec.split = split[static_cast<std::size_t>(i)];
        char name[64];
        std::snprintf(name, sizeof name, "fields/rec_%06d.ofc", i);
        rec.path = name;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

int specimen_of(const LabeledFieldRecord& rec, int pool) {
    Rng r(rec.seed);
    return static_cast<int>(r.below(static_cast<std::uint64_t>(pool)));
}

}  // namespace

std::vector<LabeledFieldRecord> generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir,
                                                 int threads) {
    auto records = plan_dataset(spec);
    const GridSpec grid = grid_of(spec);

    std::map<int, std::vector<std::size_t>> by_specimen;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_specimen[specimen_of(records[i], spec.phantom_pool)].push_back(i);

    for (const auto& [specimen, members] : by_specimen) {
        const auto shapes =
            random_specimen(derive_seed(spec.seed, static_cast<std::uint64_t>(specimen), 0x7068616eULL), grid,
                            spec.specimen_fov);
        const RIVolume phantom = make_phantom(shapes, grid, spec.optics.n_medium);
        const PotentialSpectrum potential = potential_spectrum(phantom, spec.optics);
        parallel_for(members.size(), threads, [&](std::size_t m) {
            const auto& rec = records[members[m]];
            ComplexField2D field = simulate_field(potential, rec.illumination, spec.optics);
            if (rec.noise) field = inject_noise(field, *rec.noise);
            save_field(out_dir / rec.path, field);
        });
    }
    save_manifest(out_dir / "manifest.jsonl", records);
    return records;
}

void ScanSpec::validate() const {
    optics.validate();
    require(depth_voxels >= 1 && is_power_of_two(static_cast<std::size_t>(depth_voxels)),
            "depth voxels must be a power of two");
    require(is_power_of_two(static_cast<std::size_t>(optics.detector_pixels)),
            "detector pixels must be a power of two");
    require(noisy_angles >= 0 && noisy_angles <= optics.num_angles, "noisy angle count exceeds the angle count");
    require(fringe_amplitude_min >= kFringeLabelThreshold && fringe_amplitude_min <= fringe_amplitude_max,
            "fringe amplitude range must start at or above 0.05");
    require(fringe_freq_min > 0.0 && fringe_freq_min <= fringe_freq_max, "fringe frequency range is invalid");
}

RIVolume scan_phantom(const ScanSpec& spec) {
    spec.validate();
    const GridSpec grid{spec.optics.detector_pixels, spec.optics.detector_pixels, spec.depth_voxels,
                        spec.optics.pixel_pitch};
    const auto shapes = spec.shapes.empty()
                            ? random_specimen(derive_seed(spec.seed, 0x7068616eULL), grid, spec.specimen_fov)
                            : spec.shapes;
    return make_phantom(shapes, grid, spec.optics.n_medium);
}

std::vector<LabeledFieldRecord> plan_scan(const ScanSpec& spec) {
    spec.validate();
    const auto angles = illumination_set(spec.optics);
    std::vector<std::size_t> order(angles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng(derive_seed(spec.seed, 0x6e6f6973ULL)).shuffle(order.begin(), order.end());
    std::vector<char> noisy(angles.size(), 0);
    for (int i = 0; i < spec.noisy_angles; ++i) noisy[order[static_cast<std::size_t>(i)]] = 1;

    std::vector<LabeledFieldRecord> records;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        LabeledFieldRecord rec;
        rec.seed = derive_seed(spec.seed, i, 0x616e67ULL);
        rec.angle_index = static_cast<int>(i);
        rec.illumination = angles[i];
        rec.split = Split::test;
        if (noisy[i]) {
            Rng r(rec.seed);
            const double a = r.uniform(spec.fringe_amplitude_min, spec.fringe_amplitude_max);
            const double q = r.uniform(spec.fringe_freq_min, spec.fringe_freq_max);
            const double dir = r.uniform(0.0, 2.0 * std::numbers::pi);
            rec.noise = noise_from_seed(RecordKind::fringe, a, {q * std::cos(dir), q * std::sin(dir)}, 0.0, rec.seed);
        }
        rec.label = (rec.noise && rec.noise->above_threshold()) ? Label::noisy : Label::clean;
        char name[64];
        std::snprintf(name, sizeof name, "fields/angle_%03zu.ofc", i);
        rec.path = name;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<LabeledFieldRecord> generate_scan(const ScanSpec& spec, const std::filesystem::path& out_dir,
                                              int threads) {
    auto records = plan_scan(spec);
    const PotentialSpectrum potential = potential_spectrum(scan_phantom(spec), spec.optics);
    parallel_for(records.size(), threads, [&](std::size_t i) {
        const auto& rec = records[i];
        ComplexField2D field = simulate_field(potential, rec.illumination, spec.optics);
        if (rec.noise) field = inject_noise(field, *rec.noise);
        save_field(out_dir / rec.path, field);
    });
    save_manifest(out_dir / "manifest.jsonl", records);
    return records;
}

std::string encode_manifest(const std::vector<LabeledFieldRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["path"] = r.path;
        j["label"] = label_name(r.label);
        j["kind"] = r.kind_name();
        const bool fringe = r.noise && r.noise->kind == NoiseKind::fringe;
        const bool broken = r.noise && r.noise->kind == NoiseKind::broken;
        j["fringe_amplitude"] = fringe ? r.noise->fringe_amplitude : 0.0;
        j["fringe_freq"] = fringe ? std::vector<double>{r.noise->fringe_freq.x, r.noise->fringe_freq.y}
                                  : std::vector<double>{0.0, 0.0};
        j["broken_fraction"] = broken ? r.noise->broken_fraction : 0.0;
        j["angle_index"] = r.angle_index;
        j["k_in"] = std::vector<double>{r.illumination.kx, r.illumination.ky, r.illumination.kz};
        j["seed"] = r.seed;
        j["split"] = r.split == Split::test ? "test" : "train";
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<LabeledFieldRecord> decode_manifest(std::string_view text, const std::string& context) {
    std::vector<LabeledFieldRecord> records;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = context + ":" + std::to_string(line_no);
        try {
            const auto j = nlohmann::json::parse(line);
            LabeledFieldRecord r;
            r.path = j.at("path").get<std::string>();
            r.label = parse_label(j.at("label").get<std::string>());
            const auto kind = j.at("kind").get<std::string>();
            r.seed = j.at("seed").get<std::uint64_t>();
            const auto freq = j.at("fringe_freq").get<std::vector<double>>();
            if (freq.size() != 2) fail_invalid("fringe_freq must have two components");
            if (kind == "fringe") {
                r.noise = noise_from_seed(RecordKind::fringe, j.at("fringe_amplitude").get<double>(),
                                          {freq[0], freq[1]}, 0.0, r.seed);
            } else if (kind == "broken") {
                r.noise = noise_from_seed(RecordKind::broken, 0.0, {}, j.at("broken_fraction").get<double>(), r.seed);
            } else if (kind != "none") {
                fail_invalid("unknown noise kind '" + kind + "'");
            }
            r.angle_index = j.at("angle_index").get<int>();
            const auto k = j.at("k_in").get<std::vector<double>>();
            if (k.size() != 3) fail_invalid("k_in must have three components");
            r.illumination = {k[0], k[1], k[2]};
            const auto split = j.at("split").get<std::string>();
            if (split != "train" && split != "test") fail_invalid("split must be train or test");
            r.split = split == "test" ? Split::test : Split::train;
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            fail_invalid(where + ": " + e.what());
        } catch (const Error& e) {
            fail_invalid(where + ": " + e.what());
        }
    }
    return records;
}

void save_manifest(const std::filesystem::path& path, const std::vector<LabeledFieldRecord>& records) {
    write_file(path, encode_manifest(records));
}

std::vector<LabeledFieldRecord> load_manifest(const std::filesystem::path& path) {
    return decode_manifest(read_file(path), path.string());
}

}  // namespace odtqc
