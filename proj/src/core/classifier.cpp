#include "classifier.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "augment.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "retrieval.hpp"
#include "rng.hpp"

namespace odtqc {

void TrainConfig::validate() const {
    require(epochs >= 1, "epochs must be at least 1");
    require(batch_size >= 1, "batch size must be at least 1");
    require(adam.learning_rate > 0.0, "learning rate must be positive");
    require(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0,
            "ADAM betas must lie in [0, 1)");
    require(adam.epsilon > 0.0, "ADAM epsilon must be positive");
    require(decision_threshold > 0.0 && decision_threshold < 1.0, "decision threshold must lie in (0, 1)");
    for (double r : dropout_rates) require(r >= 0.0 && r < 1.0, "dropout rates must lie in [0, 1)");
    require(elastic_alpha >= 0.0 && elastic_sigma > 0.0, "elastic alpha must be >= 0 and sigma > 0");
    require(validation_fraction >= 0.0 && validation_fraction < 1.0, "validation fraction must lie in [0, 1)");
}

Metrics evaluate_metrics(const std::vector<Label>& predictions, const std::vector<Label>& truths) {
    require(predictions.size() == truths.size(), "prediction and truth lists differ in length");
    Metrics m;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const bool p = predictions[i] == Label::noisy, t = truths[i] == Label::noisy;
        if (p && t) ++m.tp;
        else if (!p && !t) ++m.tn;
        else if (p && !t) ++m.fp;
        else ++m.fn;
    }
    const double total = static_cast<double>(truths.size());
    if (total > 0) m.accuracy = static_cast<double>(m.tp + m.tn) / total;
    if (m.tn + m.fp > 0) m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
    if (m.tp + m.fn > 0) m.sensitivity = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    return m;
}

Tensor field_to_input(const ComplexField2D& field, InputMode mode, int crop) {
    field.validate();
    const PhaseImage amplitude = amplitude_of(field);
    PhaseImage phase;
    if (mode != InputMode::amplitude) phase = unwrap_phase(wrapped_phase_of(field), amplitude);
    const std::size_t plane = static_cast<std::size_t>(crop) * crop;
    Tensor out({channels_of(mode), crop, crop});
    auto put = [&](const PhaseImage& img, std::size_t channel) {
        const PhaseImage c = center_crop(img, crop);
        std::copy(c.values.begin(), c.values.end(), out.values.begin() + static_cast<std::ptrdiff_t>(channel * plane));
    };
    switch (mode) {
        case InputMode::phase: put(phase, 0); break;
        case InputMode::amplitude: put(amplitude, 0); break;
        case InputMode::complex:
            put(amplitude, 0);
            put(phase, 1);
            break;
    }
    return out;
}

Label decide(double probability, double threshold) {
    return probability > threshold ? Label::noisy : Label::clean;
}

Classification classify_input(const NetParams& params, const Tensor& input, double threshold) {
    require(threshold > 0.0 && threshold < 1.0, "decision threshold must lie in (0, 1)");
    const ForwardCache c = forward_pass(params, input, PassMode::eval, 0);
    return {decide(c.probability, threshold), c.probability};
}

Classification classify(const NetParams& params, const ComplexField2D& field, double threshold) {
    if (field.width < kNetInputSize || field.height < kNetInputSize)
        fail_invalid("field is smaller than the 128x128 network input");
    return classify_input(params, field_to_input(field, params.mode()), threshold);
}

namespace {

int as_int(Label l) { return l == Label::noisy ? 1 : 0; }

struct ValidationStats {
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    double loss = std::numeric_limits<double>::quiet_NaN();
};

ValidationStats validate_on(const NetParams& params, const std::vector<Sample>& samples, double threshold) {
    ValidationStats v;
    if (samples.empty()) return v;
    std::size_t correct = 0;
    double loss = 0.0;
    for (const auto& s : samples) {
        const Classification c = classify_input(params, s.input, threshold);
        if (c.label == s.label) ++correct;
        loss += bce_loss(c.probability, as_int(s.label));
    }
    v.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    v.loss = loss / static_cast<double>(samples.size());
    return v;
}

}  // namespace

TrainResult train_samples(const std::vector<Sample>& train, const std::vector<Sample>& validation,
                          const TrainConfig& config, const NetParams& initial, const EpochCallback& on_epoch) {
    config.validate();
    require(!train.empty(), "training set is empty");
    const bool has_clean = std::any_of(train.begin(), train.end(), [](const Sample& s) { return s.label == Label::clean; });
    const bool has_noisy = std::any_of(train.begin(), train.end(), [](const Sample& s) { return s.label == Label::noisy; });
    require(has_clean && has_noisy, "training set must contain both clean and noisy samples");
    require(config.dropout_rates.empty() || config.dropout_rates.size() == initial.linear().size(),
            "one dropout rate per linear layer is required");

    TrainResult result;
    NetParams params = initial;
    result.params = params;
    AdamState state;
    // Gradients are accumulated in a fixed number of partial buffers, each
    // owning a contiguous slice of the batch, then summed in slot order; the
    // result does not depend on the worker count.
    constexpr std::size_t kSlots = 4;
    const int workers = std::max(1, config.threads);
    std::vector<NetParams> partial(std::min<std::size_t>(kSlots, static_cast<std::size_t>(config.batch_size)),
                                   params.zeros_like());
    NetParams grads = params.zeros_like();

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double best_acc = -1.0, best_loss = 0.0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch), 0x73687566ULL)).shuffle(order.begin(), order.end());
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const std::size_t count = stop - start;
            std::vector<double> probs(count);
            const std::size_t used = std::min(partial.size(), count);
            parallel_for(used, workers, [&](std::size_t t) {
                auto& g = partial[t];
                std::fill(g.data().begin(), g.data().end(), 0.0);
                const std::size_t lo = count * t / used, hi = count * (t + 1) / used;
                for (std::size_t k = lo; k < hi; ++k) {
                    const std::size_t idx = order[start + k];
                    const std::uint64_t s = derive_seed(config.seed, static_cast<std::uint64_t>(epoch), idx);
                    const Tensor x = elastic_transform(train[idx].input, config.elastic_alpha, config.elastic_sigma, s);
                    const ForwardCache cache =
                        forward_pass(params, x, PassMode::train, splitmix64(s), config.dropout_rates);
                    probs[k] = cache.probability;
                    backward(params, cache, as_int(train[idx].label), g);
                }
            });
            std::fill(grads.data().begin(), grads.data().end(), 0.0);
            for (std::size_t t = 0; t < used; ++t)
                for (std::size_t i = 0; i < grads.data().size(); ++i) grads.data()[i] += partial[t].data()[i];
            for (double& g : grads.data()) g /= static_cast<double>(count);
            adam_step(params.data(), grads.data(), state, config.adam);
            ++result.optimizer_steps;
            for (std::size_t k = 0; k < count; ++k) {
                const Label truth = train[order[start + k]].label;
                loss_sum += bce_loss(probs[k], as_int(truth));
                if (decide(probs[k], config.decision_threshold) == truth) ++correct;
            }
        }
        EpochLog log;
        log.epoch = epoch;
        log.train_loss = loss_sum / static_cast<double>(train.size());
        log.train_acc = static_cast<double>(correct) / static_cast<double>(train.size());
        const ValidationStats v = validate_on(params, validation, config.decision_threshold);
        log.val_acc = v.accuracy;
        log.val_loss = v.loss;
        result.log.push_back(log);
        // Accuracy ties go to the lower validation loss.
        if (validation.empty() || v.accuracy > best_acc || (v.accuracy == best_acc && v.loss < best_loss)) {
            best_acc = v.accuracy;
            best_loss = v.loss;
            result.params = params;
            result.best_epoch = epoch;
        }
        if (on_epoch) on_epoch(log);
    }
    return result;
}

std::vector<Sample> load_samples(const std::filesystem::path& manifest, const std::vector<LabeledFieldRecord>& records,
                                 InputMode mode, int threads) {
    const auto base = manifest.parent_path();
    std::vector<Sample> out(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) {
        out[i].input = field_to_input(load_field(base / records[i].path), mode);
        out[i].label = records[i].label;
    });
    return out;
}

TrainResult train(const std::filesystem::path& manifest, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    const auto records = load_manifest(manifest);
    std::vector<LabeledFieldRecord> train_records;
    for (const auto& r : records)
        if (r.split == Split::train) train_records.push_back(r);
    require(!train_records.empty(), "manifest has no training records");

    std::vector<std::size_t> order(train_records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng(derive_seed(config.seed, 0x76616cULL)).shuffle(order.begin(), order.end());
    const auto n_val = static_cast<std::size_t>(std::llround(config.validation_fraction * train_records.size()));
    std::vector<char> is_val(train_records.size(), 0);
    for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = 1;

    std::vector<LabeledFieldRecord> fit, val;
    for (std::size_t i = 0; i < train_records.size(); ++i) (is_val[i] ? val : fit).push_back(train_records[i]);
    bool clean = false, noisy = false;
    for (const auto& r : fit) (r.label == Label::clean ? clean : noisy) = true;
    require(clean && noisy, "manifest training split must contain both clean and noisy records");

    const auto fit_samples = load_samples(manifest, fit, config.input_mode, config.threads);
    const auto val_samples = load_samples(manifest, val, config.input_mode, config.threads);
    return train_samples(fit_samples, val_samples, config, init_params(config.seed, config.input_mode), on_epoch);
}

std::string encode_train_log(const std::vector<EpochLog>& log) {
    std::string out = "epoch,train_loss,train_acc,val_acc,val_loss\n";
    char line[160];
    for (const auto& e : log) {
        std::snprintf(line, sizeof line, "%d,%.10f,%.6f,%.6f,%.10f\n", e.epoch, e.train_loss, e.train_acc, e.val_acc,
                      e.val_loss);
        out += line;
    }
    return out;
}

}  // namespace odtqc
