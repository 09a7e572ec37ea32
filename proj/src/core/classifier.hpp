#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

#include "dataset.hpp"
#include "field.hpp"
#include "net.hpp"
#include "rule.hpp"

namespace odtqc {

inline constexpr int kNetInputSize = 128;

struct TrainConfig {
    int epochs = 20;
    int batch_size = 16;
    AdamConfig adam;
    std::vector<double> dropout_rates{0.3, 0.5, 0.5};
    double decision_threshold = 0.5;
    double elastic_alpha = 8.0;
    double elastic_sigma = 4.0;
    double validation_fraction = 0.1;
    InputMode input_mode = InputMode::phase;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;
};

// Confusion counts with noisy as the positive class. Undefined rates are NaN.
struct Metrics {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    double specificity = std::numeric_limits<double>::quiet_NaN();
    double sensitivity = std::numeric_limits<double>::quiet_NaN();
};

Metrics evaluate_metrics(const std::vector<Label>& predictions, const std::vector<Label>& truths);

// phase: unwrapped radians (amplitude-guided); amplitude: |u|; complex: [|u|, phase].
// The representation is computed on the full field, then center-cropped.
Tensor field_to_input(const ComplexField2D& field, InputMode mode, int crop = kNetInputSize);

struct Sample {
    Tensor input;
    Label label = Label::clean;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    NetParams params;  // best validation accuracy, ties to the lower validation loss
    std::vector<EpochLog> log;
    int best_epoch = 0;
    std::size_t optimizer_steps = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Trains from already-converted samples. The validation set may be empty, in
// which case the final epoch is kept.
TrainResult train_samples(const std::vector<Sample>& train, const std::vector<Sample>& validation,
                          const TrainConfig& config, const NetParams& initial, const EpochCallback& on_epoch = {});

// Loads the manifest's train split, holds out validation_fraction of it and
// trains the standard architecture.
TrainResult train(const std::filesystem::path& manifest, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

std::vector<Sample> load_samples(const std::filesystem::path& manifest, const std::vector<LabeledFieldRecord>& records,
                                 InputMode mode, int threads = 1);

struct Classification {
    Label label = Label::clean;
    double probability = 0.5;
};

Classification classify_input(const NetParams& params, const Tensor& input, double threshold);
Classification classify(const NetParams& params, const ComplexField2D& field, double threshold);
Label decide(double probability, double threshold);

std::string encode_train_log(const std::vector<EpochLog>& log);

}  // namespace odtqc
