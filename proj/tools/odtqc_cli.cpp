// Command-line front end. Flags are translated into config keys and handed to
// the library through the C API; any flag overrides the same key in --config.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "odtqc/odtqc.h"

namespace {

struct ConfigGuard {
    odtqc_config* cfg = nullptr;
    ~ConfigGuard() { odtqc_config_destroy(cfg); }
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fputs(odtqc_usage(), stderr);
        return 1;
    }

    CLI::App app{"Optical-field quality control for diffraction tomography"};
    app.set_help_flag("-h,--help");
    std::string command, config_file;
    std::vector<std::string> sets;
    app.add_option("command", command, "Subcommand")->required();
    app.add_option("--config", config_file, "key = value config file");
    app.add_option("--set", sets, "Override any config key (key=value)");

    // Flag name -> config key.
    const std::vector<std::pair<std::string, std::string>> keyed{
        {"--seed", "seed"},
        {"--threads", "threads"},
        {"--out", "out"},
        {"--manifest", "manifest"},
        {"--model", "model"},
        {"--field", "field"},
        {"--hologram", "hologram"},
        {"--background", "background"},
        {"--phase-out", "phase_out"},
        {"--log", "log"},
        {"--report", "report"},
        {"--png", "png"},
        {"--split", "split"},
        {"--mode", "simulate.mode"},
        {"--count", "dataset.count"},
        {"--epochs", "train.epochs"},
        {"--batch-size", "train.batch_size"},
        {"--input-mode", "train.input_mode"},
        {"--net-threshold", "train.decision_threshold"},
        {"--threshold", "rule.threshold"},
        {"--rule-threshold", "rule.threshold"},
        {"--mask-radius", "rule.mask_radius"},
        {"--mask-center", "rule.mask_center"},
        {"--carrier", "retrieve.carrier"},
        {"--crop-radius", "retrieve.crop_radius"},
        {"--select", "reconstruct.select"},
        {"--slice", "reconstruct.slice"},
        {"--method", "saliency.method"},
    };
    std::map<std::string, std::string> values;
    for (const auto& [flag, key] : keyed) app.add_option(flag, values[key], "Sets config key '" + key + "'");
    bool rule = false, net = false;
    app.add_flag("--rule", rule, "Screen with the Fourier-peak rule");
    app.add_flag("--net", net, "Screen with the trained model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << "\n" << odtqc_usage();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << odtqc_usage();
        return 1;
    }

    ConfigGuard guard;
    if (odtqc_config_create(&guard.cfg) != ODTQC_OK) {
        std::cerr << "error: " << odtqc_last_error() << "\n";
        return 1;
    }
    if (!config_file.empty()) {
        const odtqc_status s = odtqc_config_merge_file(guard.cfg, config_file.c_str());
        if (s != ODTQC_OK) {
            std::cerr << "error: " << odtqc_last_error() << "\n";
            return s == ODTQC_ERR_IO ? 2 : 1;
        }
    }
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
            return 1;
        }
        odtqc_config_set(guard.cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    }
    for (const auto& [flag, key] : keyed)
        if (app.count(flag) > 0) odtqc_config_set(guard.cfg, key.c_str(), values[key].c_str());
    if (rule && net) {
        std::cerr << "error: --rule and --net are mutually exclusive\n";
        return 1;
    }
    if (rule) odtqc_config_set(guard.cfg, "screen.method", "rule");
    if (net) odtqc_config_set(guard.cfg, "screen.method", "net");

    return odtqc_run(command.c_str(), guard.cfg);
}
