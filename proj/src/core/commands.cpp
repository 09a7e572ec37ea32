#include "commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>

#include "classifier.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "recon.hpp"
#include "retrieval.hpp"
#include "saliency.hpp"
#include "simulate.hpp"

namespace odtqc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path existing(const RunConfig& cfg, const std::string& key) {
    const fs::path p = cfg.require_str(key);
    if (!fs::exists(p)) fail_io(key + ": no such file '" + p.string() + "'");
    return p;
}

std::vector<ComplexField2D> load_fields(const fs::path& manifest, const std::vector<LabeledFieldRecord>& records,
                                        int threads) {
    std::vector<ComplexField2D> fields(records.size());
    parallel_for(records.size(), threads,
                 [&](std::size_t i) { fields[i] = load_field(manifest.parent_path() / records[i].path); });
    return fields;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json metrics_json(const Metrics& m) {
    json j;
    j["tp"] = m.tp;
    j["tn"] = m.tn;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    j["accuracy"] = m.accuracy;
    j["specificity"] = m.specificity;
    j["sensitivity"] = m.sensitivity;
    return j;
}

std::vector<LabeledFieldRecord> records_in(const std::vector<LabeledFieldRecord>& all, const std::string& split) {
    if (split == "all") return all;
    if (split != "train" && split != "test") fail_invalid("split must be train, test or all, got '" + split + "'");
    const Split want = split == "train" ? Split::train : Split::test;
    std::vector<LabeledFieldRecord> out;
    for (const auto& r : all)
        if (r.split == want) out.push_back(r);
    return out;
}

Vec2 vec2_of(const RunConfig& cfg, const std::string& key, Vec2 fallback) {
    const auto v = cfg.numbers(key, {fallback.x, fallback.y});
    require(v.size() == 2, key + " needs two comma-separated values");
    return {v[0], v[1]};
}

VoxelBox box_of(const RunConfig& cfg, const RIVolume& vol) {
    const VoxelBox d = default_background_box(vol);
    const auto v = cfg.numbers("reconstruct.box", {double(d.x0), double(d.x1), double(d.y0), double(d.y1),
                                                   double(d.z0), double(d.z1)});
    require(v.size() == 6, "reconstruct.box needs x0,x1,y0,y1,z0,z1");
    return {int(v[0]), int(v[1]), int(v[2]), int(v[3]), int(v[4]), int(v[5])};
}

struct Screened {
    std::vector<double> scores;
    std::vector<Label> decisions;
};

Screened screen_fields(const RunConfig& cfg, const std::string& method, const std::vector<ComplexField2D>& fields,
                       const OpticsConfig& optics, int threads) {
    Screened s;
    s.scores.resize(fields.size());
    s.decisions.resize(fields.size());
    if (method == "rule") {
        const RuleConfig rule = cfg.rule(optics);
        parallel_for(fields.size(), threads, [&](std::size_t i) {
            s.scores[i] = rule_score(fields[i], rule);
            s.decisions[i] = rule_decide(s.scores[i], rule.threshold);
        });
    } else if (method == "net") {
        const NetParams params = load_model(existing(cfg, "model"));
        const double threshold = cfg.num("train.decision_threshold", 0.5);
        parallel_for(fields.size(), threads, [&](std::size_t i) {
            const Classification c = classify(params, fields[i], threshold);
            s.scores[i] = c.probability;
            s.decisions[i] = c.label;
        });
    } else {
        fail_invalid("screen method must be rule or net, got '" + method + "'");
    }
    return s;
}

std::string scores_csv(const std::vector<LabeledFieldRecord>& records, const Screened& s) {
    std::string out = "path,score,decision\n";
    for (std::size_t i = 0; i < records.size(); ++i)
        out += records[i].path + "," + fmt(s.scores[i]) + "," + label_name(s.decisions[i]) + "\n";
    return out;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

// --- subcommands -----------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = cfg.require_str("out");
    const std::string mode = cfg.str("simulate.mode", "dataset");
    std::vector<LabeledFieldRecord> records;
    OpticsConfig optics;
    if (mode == "dataset") {
        const DatasetSpec spec = cfg.dataset();
        optics = spec.optics;
        records = generate_dataset(spec, dir, cfg.threads());
    } else if (mode == "scan") {
        const ScanSpec spec = cfg.scan();
        optics = spec.optics;
        records = generate_scan(spec, dir, cfg.threads());
        save_volume(dir / "phantom.riv", scan_phantom(spec));
    } else {
        fail_invalid("simulate.mode must be dataset or scan, got '" + mode + "'");
    }
    if (cfg.flag("simulate.holograms", false)) {
        const double nyq = std::numbers::pi / optics.pixel_pitch;
        const Vec2 carrier = vec2_of(cfg, "retrieve.carrier", {0.45 * nyq, 0.45 * nyq});
        const double ref = cfg.num("simulate.reference_amplitude", 1.0);
        parallel_for(records.size(), cfg.threads(), [&](std::size_t i) {
            const ComplexField2D f = load_field(dir / records[i].path);
            fs::path h = fs::path("holograms") / fs::path(records[i].path).filename();
            h.replace_extension(".oph");
            save_phase(dir / h, synthesize_hologram(f, carrier, ref));
        });
    }
    std::size_t noisy = 0;
    for (const auto& r : records) noisy += r.label == Label::noisy;
    out << "wrote " << records.size() << " fields (" << noisy << " noisy) and " << (dir / "manifest.jsonl").string()
        << "\n";
}

void cmd_retrieve(const RunConfig& cfg, std::ostream& out) {
    const OpticsConfig optics = cfg.optics();
    const double nyq = std::numbers::pi / optics.pixel_pitch;
    const Vec2 carrier = vec2_of(cfg, "retrieve.carrier", {0.45 * nyq, 0.45 * nyq});
    const double radius = cfg.num("retrieve.crop_radius", 0.3 * nyq);
    ComplexField2D field = retrieve_field(load_phase(existing(cfg, "hologram")), optics.pixel_pitch, carrier, radius);
    if (cfg.has("background"))
        field = normalize_background(
            field, retrieve_field(load_phase(existing(cfg, "background")), optics.pixel_pitch, carrier, radius));
    const fs::path dest = cfg.require_str("out");
    save_field(dest, field);
    if (const auto p = cfg.get("phase_out")) save_phase(*p, unwrap_phase(wrapped_phase_of(field), amplitude_of(field)));
    out << "wrote " << dest.string() << "\n";
}

void cmd_screen(const RunConfig& cfg, std::ostream& out) {
    const fs::path manifest = existing(cfg, "manifest");
    const auto records = records_in(load_manifest(manifest), cfg.str("split", "all"));
    const OpticsConfig optics = cfg.optics();
    const auto fields = load_fields(manifest, records, cfg.threads());
    const Screened s = screen_fields(cfg, cfg.str("screen.method", "rule"), fields, optics, cfg.threads());
    const fs::path dest = cfg.require_str("out");
    write_file(dest, scores_csv(records, s));
    std::size_t noisy = std::count(s.decisions.begin(), s.decisions.end(), Label::noisy);
    out << "screened " << records.size() << " fields, " << noisy << " flagged noisy; wrote " << dest.string() << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
    const fs::path manifest = existing(cfg, "manifest");
    const fs::path model = cfg.require_str("model");
    const TrainConfig tc = cfg.training();
    const TrainResult r = train(manifest, tc, [&](const EpochLog& e) {
        out << "epoch " << e.epoch << " loss " << fmt(e.train_loss) << " train_acc " << fmt(e.train_acc)
            << " val_acc " << fmt(e.val_acc) << " val_loss " << fmt(e.val_loss) << std::endl;
    });
    save_model(model, r.params);
    const fs::path log = cfg.str("log", model.string() + ".log.csv");
    write_file(log, encode_train_log(r.log));
    out << "best epoch " << r.best_epoch << ", " << r.optimizer_steps << " optimizer steps; wrote " << model.string()
        << "\n";
}

json evaluate_json(const RunConfig& cfg, const fs::path& manifest, const NetParams& params, std::string* csv) {
    const auto all = load_manifest(manifest);
    const auto test = records_in(all, cfg.str("split", "test"));
    require(!test.empty(), "evaluation split is empty");
    const int threads = cfg.threads();
    const TrainConfig tc = cfg.training();
    const auto fields = load_fields(manifest, test, threads);

    std::vector<Label> truth, net(test.size()), rule(test.size());
    std::vector<double> prob(test.size()), score(test.size());
    for (const auto& r : test) truth.push_back(r.label);
    const OpticsConfig optics = cfg.optics();
    RuleConfig rc = cfg.rule(optics);
    parallel_for(test.size(), threads, [&](std::size_t i) {
        const Classification c = classify(params, fields[i], tc.decision_threshold);
        net[i] = c.label;
        prob[i] = c.probability;
        score[i] = rule_score(fields[i], rc);
    });

    // The rule threshold is calibrated on the training split when one exists.
    const auto train_records = records_in(all, "train");
    if (cfg.flag("evaluate.calibrate_rule", true) && !train_records.empty()) {
        const auto train_fields = load_fields(manifest, train_records, threads);
        std::vector<double> ts(train_fields.size());
        std::vector<Label> tt;
        parallel_for(train_fields.size(), threads, [&](std::size_t i) { ts[i] = rule_score(train_fields[i], rc); });
        for (const auto& r : train_records) tt.push_back(r.label);
        rc.threshold = calibrate_threshold(ts, tt);
    }
    for (std::size_t i = 0; i < test.size(); ++i) rule[i] = rule_decide(score[i], rc.threshold);

    json j;
    j["records"] = test.size();
    j["net"] = metrics_json(evaluate_metrics(net, truth));
    j["rule"] = metrics_json(evaluate_metrics(rule, truth));
    j["rule"]["threshold"] = rc.threshold;
    for (const char* kind : {"fringe", "broken"}) {
        std::vector<Label> pn, pr, t;
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (test[i].kind_name() != kind && test[i].kind_name() != "none") continue;
            pn.push_back(net[i]);
            pr.push_back(rule[i]);
            t.push_back(truth[i]);
        }
        j["by_kind"][kind]["net"] = metrics_json(evaluate_metrics(pn, t));
        j["by_kind"][kind]["rule"] = metrics_json(evaluate_metrics(pr, t));
    }
    if (csv) {
        *csv = "path,label,kind,net_probability,net_decision,rule_score,rule_decision\n";
        for (std::size_t i = 0; i < test.size(); ++i)
            *csv += test[i].path + "," + label_name(truth[i]) + "," + test[i].kind_name() + "," + fmt(prob[i]) + "," +
                    label_name(net[i]) + "," + fmt(score[i]) + "," + label_name(rule[i]) + "\n";
    }
    return j;
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const fs::path manifest = existing(cfg, "manifest");
    const NetParams params = load_model(existing(cfg, "model"));
    std::string csv;
    const json j = evaluate_json(cfg, manifest, params, &csv);
    if (const auto p = cfg.get("out")) write_file(*p, csv);
    if (const auto p = cfg.get("report")) write_json(*p, j);
    out << j.dump(2) << "\n";
}

struct ReconOutcome {
    RIVolume volume;
    std::size_t used = 0;
    double sd = 0.0;
};

ReconOutcome reconstruct_selected(const RunConfig& cfg, const fs::path& manifest, const std::string& select,
                                  const fs::path& dest) {
    const auto records = load_manifest(manifest);
    const OpticsConfig optics = cfg.optics();
    const int threads = cfg.threads();
    const auto fields = load_fields(manifest, records, threads);
    std::vector<char> keep(records.size(), 1);
    if (select == "clean") {
        for (std::size_t i = 0; i < records.size(); ++i) keep[i] = records[i].label == Label::clean;
    } else if (select == "rule" || select == "net") {
        const Screened s = screen_fields(cfg, select, fields, optics, threads);
        for (std::size_t i = 0; i < records.size(); ++i) keep[i] = s.decisions[i] == Label::clean;
    } else if (select != "all") {
        fail_invalid("reconstruct.select must be all, clean, rule or net, got '" + select + "'");
    }
    std::vector<ComplexField2D> chosen;
    std::vector<WaveVector> k_in;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (keep[i]) {
            chosen.push_back(fields[i]);
            k_in.push_back(records[i].illumination);
        }
    if (chosen.empty()) fail_invalid("no fields left to reconstruct after screening");
    ReconOutcome r;
    r.volume = reconstruct_tomogram(chosen, k_in, optics, static_cast<int>(cfg.integer("reconstruct.depth_voxels", cfg.integer("scan.depth_voxels", 32))),
                                    threads);
    r.used = chosen.size();
    r.sd = background_sd(r.volume, box_of(cfg, r.volume));
    save_volume(dest, r.volume);
    return r;
}

void cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
    const fs::path dest = cfg.require_str("out");
    const ReconOutcome r = reconstruct_selected(cfg, existing(cfg, "manifest"), cfg.str("reconstruct.select", "all"), dest);
    const auto [lo, hi] = std::minmax_element(r.volume.values.begin(), r.volume.values.end());
    if (const auto png = cfg.get("png")) {
        const int z = static_cast<int>(cfg.integer("reconstruct.slice", r.volume.nz / 2));
        require(z >= 0 && z < r.volume.nz, "reconstruct.slice outside the volume");
        RealImage slice{r.volume.nx, r.volume.ny, {}};
        const auto plane = static_cast<std::size_t>(r.volume.nx) * r.volume.ny;
        slice.values.assign(r.volume.values.begin() + static_cast<std::ptrdiff_t>(plane * z),
                            r.volume.values.begin() + static_cast<std::ptrdiff_t>(plane * (z + 1)));
        save_png_gray(*png, slice, *lo, *hi);
    }
    out << "reconstructed from " << r.used << " fields; RI min " << fmt(*lo) << " max " << fmt(*hi)
        << " background_sd " << fmt(r.sd) << "; wrote " << dest.string() << "\n";
}

void cmd_saliency(const RunConfig& cfg, std::ostream& out) {
    const NetParams params = load_model(existing(cfg, "model"));
    const ComplexField2D field = load_field(existing(cfg, "field"));
    const SaliencyMethod method = parse_saliency_method(cfg.str("saliency.method", "gradcam"));
    const SaliencyMap m = saliency(params, field_to_input(field, params.mode()), method);
    const fs::path prefix = cfg.require_str("out");
    save_phase(prefix.string() + ".oph", m.map);
    save_png_gray(prefix.string() + ".png", m.map, 0.0, 1.0);
    out << saliency_method_name(method) << " map written to " << prefix.string() << ".{oph,png}"
        << (m.degenerate ? " (degenerate: all zeros)" : "") << "\n";
}

json inventory(const fs::path& dir, const fs::path& skip) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path() != skip) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    json inv = json::array();
    for (const auto& f : files) {
        const std::string data = read_file(f);
        char crc[16];
        std::snprintf(crc, sizeof crc, "%08x", crc32_of(data));
        inv.push_back({{"path", fs::relative(f, dir).generic_string()}, {"bytes", data.size()}, {"crc32", crc}});
    }
    return inv;
}

void cmd_pipeline(const RunConfig& base, std::ostream& out) {
    const fs::path dir = base.require_str("out");
    RunConfig cfg = base;

    cfg.set("out", (dir / "dataset").string());
    cfg.set("simulate.mode", "dataset");
    cmd_simulate(cfg, out);

    cfg.set("manifest", (dir / "dataset" / "manifest.jsonl").string());
    cfg.set("model", (dir / "model.qcn").string());
    cfg.set("log", (dir / "train_log.csv").string());
    cmd_train(cfg, out);

    const NetParams params = load_model(dir / "model.qcn");
    std::string csv;
    cfg.set("split", "test");
    const json eval = evaluate_json(cfg, dir / "dataset" / "manifest.jsonl", params, &csv);
    write_file(dir / "evaluation.csv", csv);

    cfg.set("out", (dir / "scan").string());
    cfg.set("simulate.mode", "scan");
    cmd_simulate(cfg, out);
    const fs::path scan_manifest = dir / "scan" / "manifest.jsonl";

    cfg.set("split", "all");
    // Screening reuses the rule threshold calibrated during evaluation.
    if (!base.get("rule.threshold")) cfg.set("rule.threshold", eval["rule"]["threshold"].dump());
    const auto scan_records = load_manifest(scan_manifest);
    const auto scan_fields = load_fields(scan_manifest, scan_records, cfg.threads());
    json screening;
    for (const char* method : {"rule", "net"}) {
        const Screened s = screen_fields(cfg, method, scan_fields, cfg.optics(), cfg.threads());
        write_file(dir / (std::string("screen_") + method + ".csv"), scores_csv(scan_records, s));
        std::vector<Label> truth;
        for (const auto& r : scan_records) truth.push_back(r.label);
        screening[method] = metrics_json(evaluate_metrics(s.decisions, truth));
    }

    json recon;
    for (const char* select : {"all", "clean", "net", "rule"}) {
        try {
            const ReconOutcome r =
                reconstruct_selected(cfg, scan_manifest, select, dir / (std::string("volume_") + select + ".riv"));
            recon[select] = {{"fields", r.used}, {"background_sd", r.sd}};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::invalid_argument) throw;
            recon[select] = {{"fields", 0}, {"error", e.what()}};
        }
    }

    json summary;
    summary["seed"] = cfg.seed();
    summary["evaluation"] = eval;
    summary["scan_screening"] = screening;
    summary["reconstruction"] = recon;
    const fs::path summary_path = dir / "summary.json";
    summary["files"] = inventory(dir, summary_path);
    write_json(summary_path, summary);
    out << "pipeline summary written to " << summary_path.string() << "\n";
}

using Handler = std::function<void(const RunConfig&, std::ostream&)>;

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> h{
        {"simulate", cmd_simulate},   {"retrieve", cmd_retrieve}, {"screen", cmd_screen},
        {"train", cmd_train},         {"evaluate", cmd_evaluate}, {"reconstruct", cmd_reconstruct},
        {"saliency", cmd_saliency},   {"pipeline", cmd_pipeline},
    };
    return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : handlers()) n.push_back(name);
        return n;
    }();
    return names;
}

std::string usage_text() {
    return "usage: odtqc <command> [--config FILE] [--seed N] [--threads N] [--set key=value ...] [options]\n"
           "commands:\n"
           "  simulate     synthesize a labeled field dataset (or a multi-angle scan)\n"
           "  retrieve     recover a complex field from an off-axis hologram\n"
           "  screen       score fields with the Fourier-peak rule or a trained model\n"
           "  train        train the quality-control network on a manifest\n"
           "  evaluate     confusion metrics for the network and the calibrated rule\n"
           "  reconstruct  refractive-index tomogram from (screened) fields\n"
           "  saliency     CAM, guided backprop or Grad-CAM map for one field\n"
           "  pipeline     simulate, train, evaluate, screen and reconstruct end to end\n";
}

void dispatch_command(const std::string& name, const RunConfig& config, std::ostream& out) {
    for (const auto& [n, fn] : handlers())
        if (n == name) {
            (void)config.seed();
            fn(config, out);
            return;
        }
    fail_invalid("unknown command '" + name + "'");
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        err << "error: unknown command '" << name << "'\n" << usage_text();
        return 1;
    }
    try {
        dispatch_command(name, config, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::io ? 2 : 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace odtqc
