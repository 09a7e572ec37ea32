#include "odtqc/odtqc.h"

#include <iostream>
#include <string>

#include "classifier.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "error.hpp"
#include "io.hpp"
#include "recon.hpp"
#include "rule.hpp"

struct odtqc_config {
    odtqc::RunConfig cfg;
};
struct odtqc_field {
    odtqc::ComplexField2D field;
};
struct odtqc_model {
    odtqc::NetParams params;
};
struct odtqc_volume {
    odtqc::RIVolume volume;
};

namespace {

thread_local std::string last_error;

template <class F>
odtqc_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return ODTQC_OK;
    } catch (const odtqc::Error& e) {
        last_error = e.what();
        switch (e.kind()) {
            case odtqc::ErrorKind::invalid_argument: return ODTQC_ERR_INVALID;
            case odtqc::ErrorKind::io: return ODTQC_ERR_IO;
            default: return ODTQC_ERR_INTERNAL;
        }
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return ODTQC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ODTQC_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) odtqc::fail_invalid(std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* odtqc_last_error(void) { return last_error.c_str(); }
const char* odtqc_version(void) { return "0.1.0"; }

odtqc_status odtqc_config_create(odtqc_config** out) {
    return guarded([&] {
        need(out, "out");
        *out = new odtqc_config{};
    });
}

odtqc_status odtqc_config_merge_file(odtqc_config* cfg, const char* path) {
    return guarded([&] {
        need(cfg, "config");
        need(path, "path");
        const odtqc::RunConfig loaded = odtqc::RunConfig::load(path);
        for (const auto& [k, v] : loaded.entries()) cfg->cfg.set(k, v);
    });
}

odtqc_status odtqc_config_set(odtqc_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        need(cfg, "config");
        need(key, "key");
        need(value, "value");
        if (!*key) odtqc::fail_invalid("empty config key");
        cfg->cfg.set(key, value);
    });
}

odtqc_status odtqc_config_get(const odtqc_config* cfg, const char* key, const char** value) {
    return guarded([&] {
        need(cfg, "config");
        need(key, "key");
        need(value, "value");
        const auto it = cfg->cfg.entries().find(key);
        if (it == cfg->cfg.entries().end()) odtqc::fail_invalid(std::string("no config key '") + key + "'");
        *value = it->second.c_str();
    });
}

void odtqc_config_destroy(odtqc_config* cfg) { delete cfg; }

size_t odtqc_command_count(void) { return odtqc::command_names().size(); }

const char* odtqc_command_name(size_t index) {
    const auto& n = odtqc::command_names();
    return index < n.size() ? n[index].c_str() : nullptr;
}

const char* odtqc_usage(void) {
    static const std::string text = odtqc::usage_text();
    return text.c_str();
}

int odtqc_run(const char* command, const odtqc_config* cfg) {
    static const odtqc_config empty{};
    return odtqc::run_command(command ? command : "", cfg ? cfg->cfg : empty.cfg, std::cout, std::cerr);
}

odtqc_status odtqc_field_create(int width, int height, double pixel_pitch, const double* values, odtqc_field** out) {
    return guarded([&] {
        need(values, "values");
        need(out, "out");
        if (width <= 0 || height <= 0) odtqc::fail_invalid("field dimensions must be positive");
        odtqc::ComplexField2D f;
        f.width = width;
        f.height = height;
        f.pixel_pitch = pixel_pitch;
        f.values.resize(static_cast<std::size_t>(width) * height);
        for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = {values[2 * i], values[2 * i + 1]};
        f.validate();
        *out = new odtqc_field{std::move(f)};
    });
}

odtqc_status odtqc_field_load(const char* path, odtqc_field** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new odtqc_field{odtqc::load_field(path)};
    });
}

odtqc_status odtqc_field_save(const odtqc_field* field, const char* path) {
    return guarded([&] {
        need(field, "field");
        need(path, "path");
        odtqc::save_field(path, field->field);
    });
}

odtqc_status odtqc_field_shape(const odtqc_field* field, int* width, int* height, double* pixel_pitch) {
    return guarded([&] {
        need(field, "field");
        if (width) *width = field->field.width;
        if (height) *height = field->field.height;
        if (pixel_pitch) *pixel_pitch = field->field.pixel_pitch;
    });
}

const double* odtqc_field_data(const odtqc_field* field) {
    return field ? reinterpret_cast<const double*>(field->field.values.data()) : nullptr;
}

odtqc_status odtqc_field_rule_score(const odtqc_field* field, const odtqc_config* cfg, double* score) {
    return guarded([&] {
        need(field, "field");
        need(score, "score");
        const odtqc::RunConfig c = cfg ? cfg->cfg : odtqc::RunConfig{};
        *score = odtqc::rule_score(field->field, c.rule(c.optics()));
    });
}

void odtqc_field_destroy(odtqc_field* field) { delete field; }

odtqc_status odtqc_model_init(uint64_t seed, const char* input_mode, odtqc_model** out) {
    return guarded([&] {
        need(input_mode, "input_mode");
        need(out, "out");
        *out = new odtqc_model{odtqc::init_params(seed, odtqc::parse_input_mode(input_mode))};
    });
}

odtqc_status odtqc_model_load(const char* path, odtqc_model** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new odtqc_model{odtqc::load_model(path)};
    });
}

odtqc_status odtqc_model_save(const odtqc_model* model, const char* path) {
    return guarded([&] {
        need(model, "model");
        need(path, "path");
        odtqc::save_model(path, model->params);
    });
}

odtqc_status odtqc_model_classify(const odtqc_model* model, const odtqc_field* field, double threshold,
                                  double* probability, int* label) {
    return guarded([&] {
        need(model, "model");
        need(field, "field");
        const auto c = odtqc::classify(model->params, field->field, threshold);
        if (probability) *probability = c.probability;
        if (label) *label = c.label == odtqc::Label::noisy ? 1 : 0;
    });
}

void odtqc_model_destroy(odtqc_model* model) { delete model; }

odtqc_status odtqc_volume_load(const char* path, odtqc_volume** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new odtqc_volume{odtqc::load_volume(path)};
    });
}

odtqc_status odtqc_volume_shape(const odtqc_volume* volume, int* nx, int* ny, int* nz, double* pitch) {
    return guarded([&] {
        need(volume, "volume");
        if (nx) *nx = volume->volume.nx;
        if (ny) *ny = volume->volume.ny;
        if (nz) *nz = volume->volume.nz;
        if (pitch) *pitch = volume->volume.voxel_pitch;
    });
}

const double* odtqc_volume_data(const odtqc_volume* volume) {
    return volume ? volume->volume.values.data() : nullptr;
}

odtqc_status odtqc_volume_background_sd(const odtqc_volume* volume, int x0, int x1, int y0, int y1, int z0, int z1,
                                        double* sd) {
    return guarded([&] {
        need(volume, "volume");
        need(sd, "sd");
        *sd = odtqc::background_sd(volume->volume, {x0, x1, y0, y1, z0, z1});
    });
}

void odtqc_volume_destroy(odtqc_volume* volume) { delete volume; }

odtqc_status odtqc_evaluate_metrics(const int* predictions, const int* truths, size_t n, odtqc_metrics* out) {
    return guarded([&] {
        need(out, "out");
        if (n > 0) {
            need(predictions, "predictions");
            need(truths, "truths");
        }
        std::vector<odtqc::Label> p(n), t(n);
        for (size_t i = 0; i < n; ++i) {
            if ((predictions[i] != 0 && predictions[i] != 1) || (truths[i] != 0 && truths[i] != 1))
                odtqc::fail_invalid("labels must be 0 (clean) or 1 (noisy)");
            p[i] = static_cast<odtqc::Label>(predictions[i]);
            t[i] = static_cast<odtqc::Label>(truths[i]);
        }
        const auto m = odtqc::evaluate_metrics(p, t);
        *out = {m.tp, m.tn, m.fp, m.fn, m.accuracy, m.specificity, m.sensitivity};
    });
}

}  // extern "C"
