#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace odtqc {

enum class InputMode : std::uint8_t { phase = 0, amplitude = 1, complex = 2 };

int channels_of(InputMode mode);
const char* input_mode_name(InputMode mode);
InputMode parse_input_mode(const std::string& s);

// Conv blocks (3x3, stride 1, zero pad 1) -> ReLU -> 2x2 max pool, except the
// last block which ends in a global max pool. The head is a stack of linear
// layers with ReLU between them and a sigmoid on the single output.
struct Architecture {
    int input_channels = 1;
    std::vector<int> conv_channels;
    std::vector<int> linear_sizes;

    // 32-64-128-256-512-1024 conv plan, 1024-512-512-1 head.
    static Architecture standard(InputMode mode);
    void validate() const;
    int pooled_size(int input_size) const;  // spatial size entering the last block
};

struct LayerView {
    int out = 0;
    int in = 0;
    int kernel = 1;  // 3 for conv, 1 for linear
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
    std::size_t weight_count() const { return static_cast<std::size_t>(out) * in * kernel * kernel; }
};

// All weights and biases in one flat buffer, declaration order:
// C1.w C1.b ... Cn.w Cn.b L1.w L1.b ... Lm.w Lm.b. Gradients and optimizer
// moments use the same layout.
class NetParams {
public:
    NetParams() = default;
    NetParams(Architecture arch, InputMode mode);

    const Architecture& arch() const { return arch_; }
    InputMode mode() const { return mode_; }
    const std::vector<LayerView>& conv() const { return conv_; }
    const std::vector<LayerView>& linear() const { return linear_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::span<double> weights(const LayerView& l) { return {data_.data() + l.weight_offset, l.weight_count()}; }
    std::span<const double> weights(const LayerView& l) const {
        return {data_.data() + l.weight_offset, l.weight_count()};
    }
    std::span<double> bias(const LayerView& l) { return {data_.data() + l.bias_offset, static_cast<std::size_t>(l.out)}; }
    std::span<const double> bias(const LayerView& l) const {
        return {data_.data() + l.bias_offset, static_cast<std::size_t>(l.out)};
    }

    NetParams zeros_like() const;
    bool same_layout(const NetParams& other) const;

private:
    Architecture arch_;
    InputMode mode_ = InputMode::phase;
    std::vector<LayerView> conv_;
    std::vector<LayerView> linear_;
    std::vector<double> data_;
};

// He-normal conv weights, Xavier-uniform linear weights, zero biases.
NetParams init_params(std::uint64_t seed, InputMode mode);
NetParams init_params(std::uint64_t seed, const Architecture& arch, InputMode mode);

// Layer primitives on [c, h, w] tensors.
Tensor conv2d(const Tensor& input, std::span<const double> weights, std::span<const double> bias, int out_channels);
Tensor max_pool2(const Tensor& input, std::vector<std::size_t>* argmax = nullptr);
Tensor adaptive_max_pool_1(const Tensor& input, std::vector<std::size_t>* argmax = nullptr);

enum class PassMode { train, eval };

struct ForwardCache {
    std::vector<Tensor> block_input;               // input of each conv block
    std::vector<Tensor> block_activation;          // post-ReLU, pre-pool
    std::vector<std::vector<std::size_t>> pool_argmax;
    std::vector<double> features;                  // output of the global pool
    std::vector<std::vector<double>> dropout_scale;  // per head layer, 0 or 1/(1-p)
    std::vector<std::vector<double>> head_input;   // after dropout
    std::vector<std::vector<double>> head_output;  // pre-activation
    double logit = 0.0;
    double probability = 0.5;
    bool valid = false;
};

double sigmoid(double z);

// Dropout rates apply to the inputs of L1..Lm in train mode (inverted
// dropout); eval mode ignores them.
ForwardCache forward_pass(const NetParams& params, const Tensor& image, PassMode mode, std::uint64_t dropout_seed,
                          std::span<const double> dropout_rates = {});

double bce_loss(double p, int y);
double bce_loss(std::span<const double> p, std::span<const int> y);

// Accumulates dL/dtheta of BCE(sigmoid(logit), y) into grads (same layout).
void backward(const NetParams& params, const ForwardCache& cache, int y, NetParams& grads);
// Accumulates d(upstream * logit)/dtheta; backward() uses upstream = p - y.
void backward_from_logit(const NetParams& params, const ForwardCache& cache, double upstream, NetParams& grads);

struct LogitGradients {
    std::vector<double> features;  // d logit / d pooled features
    Tensor block_output;           // d logit / d (output of target block after pooling), if requested
};

// Reverse pass of the logit alone. With guided = true every ReLU passes
// gradient only where both its forward output and the incoming gradient are
// positive. target_block < 0 stops at the pooled features.
LogitGradients logit_gradients(const NetParams& params, const ForwardCache& cache, bool guided, int target_block);

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

// One bias-corrected ADAM update; increments state.step first.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamConfig& config);

// QCN1: magic, input-mode byte, u32 conv count, per conv (out, in, kh, kw),
// u32 linear count, per linear (out, in), f64 parameters in declaration order,
// u32 CRC32 of everything before it.
std::string encode_model(const NetParams& params);
NetParams decode_model(std::string_view data, const std::string& context = "model");
void save_model(const std::filesystem::path& path, const NetParams& params);
NetParams load_model(const std::filesystem::path& path);

}  // namespace odtqc
