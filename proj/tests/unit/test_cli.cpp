#include <doctest.h>

#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "io.hpp"
#include "odtqc/odtqc.h"

using namespace odtqc;

namespace {

int run(const std::string& cmd, const RunConfig& cfg, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_command(cmd, cfg, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

RunConfig small_dataset_config(const std::filesystem::path& dir) {
    RunConfig c = RunConfig::parse(R"(
seed = 4
# small and quick
[optics]
detector_pixels = 64
[dataset]
count = 8
depth_voxels = 16
specimen_fov = 6
phantom_pool = 2
)");
    c.set("out", dir.string());
    return c;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = RunConfig::parse("seed = 3\n[train]\nepochs = 4  # inline\nlearning_rate=2e-4\n[rule]\nmask_center = 0.5, -1\n");
    CHECK(c.seed() == 3);
    CHECK(c.integer("train.epochs", 0) == 4);
    CHECK(c.num("train.learning_rate", 0) == 2e-4);
    CHECK(c.numbers("rule.mask_center", {}) == std::vector<double>{0.5, -1.0});
    const auto t = c.training();
    CHECK(t.epochs == 4);
    CHECK(t.adam.learning_rate == 2e-4);
    CHECK(RunConfig::parse(c.dump()).entries() == c.entries());
    auto d = c;
    d.set("train.epochs", "9");
    CHECK(d.training().epochs == 9);

    CHECK_THROWS_AS(RunConfig::parse("just words\n"), Error);
    CHECK_THROWS_AS(RunConfig::parse("a = 1\n").seed(), Error);
    CHECK_THROWS_AS(RunConfig::parse("seed = x\n").seed(), Error);
    CHECK_THROWS_AS(RunConfig::parse("seed = 1\ntrain.epochs = lots\n").training(), Error);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.cfg"), Error);
}

TEST_CASE("command exit codes") {
    std::string err;
    CHECK(run("frobnicate", RunConfig::parse("seed = 1\n"), &err) == 1);
    CHECK(err.find("usage") != std::string::npos);
    CHECK(run("simulate", RunConfig::parse("out = /tmp/x\n")) == 1);  // no seed
    CHECK(run("screen", RunConfig::parse("seed = 1\nmanifest = /nonexistent/m.jsonl\nout = /tmp/s.csv\n")) == 2);
    CHECK(run("train", RunConfig::parse("seed = 1\n")) == 1);
    for (const auto& name : {"simulate", "retrieve", "screen", "train", "evaluate", "reconstruct", "saliency", "pipeline"})
        CHECK(std::find(command_names().begin(), command_names().end(), name) != command_names().end());
}

TEST_CASE("simulate then screen with the rule") {
    const auto dir = testing::scratch("cli_screen");
    auto cfg = small_dataset_config(dir / "data");
    REQUIRE(run("simulate", cfg) == 0);
    cfg.set("manifest", (dir / "data" / "manifest.jsonl").string());
    cfg.set("screen.method", "rule");
    cfg.set("rule.threshold", "3.306");
    cfg.set("out", (dir / "scores.csv").string());
    REQUIRE(run("screen", cfg) == 0);
    const auto csv = read_file(dir / "scores.csv");
    CHECK(csv.rfind("path,score,decision\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    // Same config, same bytes.
    REQUIRE(run("screen", cfg) == 0);
    CHECK(read_file(dir / "scores.csv") == csv);
}

TEST_CASE("C API") {
    CHECK(std::string(odtqc_version()).size() > 0);
    odtqc_config* cfg = nullptr;
    REQUIRE(odtqc_config_create(&cfg) == ODTQC_OK);
    CHECK(odtqc_config_set(cfg, "seed", "5") == ODTQC_OK);
    const char* v = nullptr;
    CHECK(odtqc_config_get(cfg, "seed", &v) == ODTQC_OK);
    CHECK(std::string(v) == "5");
    CHECK(odtqc_config_merge_file(cfg, "/nonexistent.cfg") == ODTQC_ERR_IO);
    CHECK(std::string(odtqc_last_error()).find("nonexistent") != std::string::npos);
    CHECK(odtqc_config_set(nullptr, "a", "b") == ODTQC_ERR_INVALID);
    CHECK(odtqc_run("nope", cfg) == 1);
    CHECK(odtqc_command_count() == 8);

    std::vector<double> vals(2 * 128 * 128);
    for (std::size_t i = 0; i < vals.size(); i += 2) vals[i] = 1.0;
    odtqc_field* f = nullptr;
    REQUIRE(odtqc_field_create(128, 128, 0.16, vals.data(), &f) == ODTQC_OK);
    double score = 0;
    CHECK(odtqc_field_rule_score(f, nullptr, &score) == ODTQC_OK);
    CHECK(score == doctest::Approx(-12.0));
    odtqc_model* m = nullptr;
    CHECK(odtqc_model_init(1, "sideways", &m) == ODTQC_ERR_INVALID);
    REQUIRE(odtqc_model_init(1, "phase", &m) == ODTQC_OK);
    double p = 0;
    int label = -1;
    CHECK(odtqc_model_classify(m, f, 0.5, &p, &label) == ODTQC_OK);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    const auto dir = testing::scratch("capi");
    CHECK(odtqc_field_save(f, (dir / "f.ofc").c_str()) == ODTQC_OK);
    odtqc_field* g = nullptr;
    CHECK(odtqc_field_load((dir / "f.ofc").c_str(), &g) == ODTQC_OK);
    CHECK(odtqc_field_load((dir / "missing.ofc").c_str(), &g) == ODTQC_ERR_IO);

    const int pred[4] = {1, 1, 0, 0}, truth[4] = {1, 0, 0, 0};
    odtqc_metrics met;
    CHECK(odtqc_evaluate_metrics(pred, truth, 4, &met) == ODTQC_OK);
    CHECK(met.accuracy == 0.75);
    const int bad[1] = {7};
    CHECK(odtqc_evaluate_metrics(bad, truth, 1, &met) == ODTQC_ERR_INVALID);

    odtqc_field_destroy(f);
    odtqc_field_destroy(g);
    odtqc_model_destroy(m);
    odtqc_config_destroy(cfg);
}
