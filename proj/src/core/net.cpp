#include "net.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "io.hpp"
#include "rng.hpp"

namespace odtqc {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

int channels_of(InputMode mode) { return mode == InputMode::complex ? 2 : 1; }

const char* input_mode_name(InputMode mode) {
    switch (mode) {
        case InputMode::phase: return "phase";
        case InputMode::amplitude: return "amplitude";
        case InputMode::complex: return "complex";
    }
    return "phase";
}

InputMode parse_input_mode(const std::string& s) {
    if (s == "phase") return InputMode::phase;
    if (s == "amplitude") return InputMode::amplitude;
    if (s == "complex") return InputMode::complex;
    fail_invalid("unknown input mode '" + s + "' (expected phase, amplitude or complex)");
}

Architecture Architecture::standard(InputMode mode) {
    Architecture a;
    a.input_channels = channels_of(mode);
    a.conv_channels = {32, 64, 128, 256, 512, 1024};
    a.linear_sizes = {512, 512, 1};
    return a;
}

void Architecture::validate() const {
    require(input_channels > 0, "input channel count must be positive");
    require(!conv_channels.empty(), "at least one conv block is required");
    require(!linear_sizes.empty() && linear_sizes.back() == 1, "the head must end in a single output");
    for (int c : conv_channels) require(c > 0, "conv channel counts must be positive");
    for (int c : linear_sizes) require(c > 0, "linear sizes must be positive");
}

int Architecture::pooled_size(int input_size) const {
    int s = input_size;
    for (std::size_t b = 0; b + 1 < conv_channels.size(); ++b) s /= 2;
    return s;
}

NetParams::NetParams(Architecture arch, InputMode mode) : arch_(std::move(arch)), mode_(mode) {
    arch_.validate();
    require(arch_.input_channels == channels_of(mode_), "input channels do not match the input mode");
    std::size_t offset = 0;
    int in = arch_.input_channels;
    for (int out : arch_.conv_channels) {
        LayerView l{out, in, 3, offset, 0};
        offset += l.weight_count();
        l.bias_offset = offset;
        offset += static_cast<std::size_t>(out);
        conv_.push_back(l);
        in = out;
    }
    for (int out : arch_.linear_sizes) {
        LayerView l{out, in, 1, offset, 0};
        offset += l.weight_count();
        l.bias_offset = offset;
        offset += static_cast<std::size_t>(out);
        linear_.push_back(l);
        in = out;
    }
    data_.assign(offset, 0.0);
}

NetParams NetParams::zeros_like() const { return NetParams(arch_, mode_); }

bool NetParams::same_layout(const NetParams& other) const {
    return mode_ == other.mode_ && arch_.input_channels == other.arch_.input_channels &&
           arch_.conv_channels == other.arch_.conv_channels && arch_.linear_sizes == other.arch_.linear_sizes &&
           data_.size() == other.data_.size();
}

NetParams init_params(std::uint64_t seed, InputMode mode) {
    return init_params(seed, Architecture::standard(mode), mode);
}

NetParams init_params(std::uint64_t seed, const Architecture& arch, InputMode mode) {
    NetParams p(arch, mode);
    Rng rng(seed);
    for (const auto& l : p.conv()) {
        const double sd = std::sqrt(2.0 / (l.in * 9.0));
        for (double& w : p.weights(l)) w = sd * rng.normal();
    }
    for (const auto& l : p.linear()) {
        const double bound = std::sqrt(6.0 / (l.in + l.out));
        for (double& w : p.weights(l)) w = rng.uniform(-bound, bound);
    }
    return p;
}

namespace {

// col[(c*9 + ky*3 + kx), y*w + x] = in[c, y+ky-1, x+kx-1] (zero outside).
void im2col(const double* in, int c, int h, int w, double* col) {
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    for (int ch = 0; ch < c; ++ch) {
        const double* src = in + ch * hw;
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                double* dst = col + (static_cast<std::size_t>(ch) * 9 + ky * 3 + kx) * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - 1;
                    double* row = dst + static_cast<std::size_t>(y) * w;
                    if (sy < 0 || sy >= h) {
                        std::fill(row, row + w, 0.0);
                        continue;
                    }
                    const double* srow = src + static_cast<std::size_t>(sy) * w;
                    const int x0 = std::max(0, 1 - kx), x1 = std::min(w, w + 1 - kx);
                    for (int x = 0; x < x0; ++x) row[x] = 0.0;
                    for (int x = x0; x < x1; ++x) row[x] = srow[x + kx - 1];
                    for (int x = x1; x < w; ++x) row[x] = 0.0;
                }
            }
        }
    }
}

void col2im(const double* col, int c, int h, int w, double* out) {
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::fill(out, out + c * hw, 0.0);
    for (int ch = 0; ch < c; ++ch) {
        double* dst = out + ch * hw;
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                const double* src = col + (static_cast<std::size_t>(ch) * 9 + ky * 3 + kx) * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    const double* row = src + static_cast<std::size_t>(y) * w;
                    double* drow = dst + static_cast<std::size_t>(sy) * w;
                    const int x0 = std::max(0, 1 - kx), x1 = std::min(w, w + 1 - kx);
                    for (int x = x0; x < x1; ++x) drow[x + kx - 1] += row[x];
                }
            }
        }
    }
}

void check_chw(const Tensor& t, const char* what) {
    if (t.shape.size() != 3 || t.shape[0] <= 0 || t.shape[1] <= 0 || t.shape[2] <= 0 ||
        t.values.size() != Tensor::count(t.shape))
        fail_invalid(std::string(what) + ": expected a [c, h, w] tensor");
}

}  // namespace

Tensor conv2d(const Tensor& input, std::span<const double> weights, std::span<const double> bias, int out_channels) {
    check_chw(input, "conv2d");
    const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
    if (out_channels <= 0 || weights.size() != static_cast<std::size_t>(out_channels) * c * 9 ||
        bias.size() != static_cast<std::size_t>(out_channels))
        fail_invalid("conv2d: weight/bias shapes do not match the input channels");
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::vector<double> col(static_cast<std::size_t>(c) * 9 * hw);
    im2col(input.values.data(), c, h, w, col.data());
    Tensor out({out_channels, h, w});
    ConstMatMap wm(weights.data(), out_channels, c * 9);
    ConstMatMap cm(col.data(), c * 9, static_cast<Eigen::Index>(hw));
    MatMap om(out.values.data(), out_channels, static_cast<Eigen::Index>(hw));
    om.noalias() = wm * cm;
    for (int o = 0; o < out_channels; ++o) om.row(o).array() += bias[o];
    return out;
}

Tensor max_pool2(const Tensor& input, std::vector<std::size_t>* argmax) {
    check_chw(input, "max_pool2");
    const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
    if (h % 2 != 0 || w % 2 != 0) fail_invalid("max_pool2: spatial dimensions must be even");
    const int oh = h / 2, ow = w / 2;
    Tensor out({c, oh, ow});
    if (argmax) argmax->assign(out.size(), 0);
    std::size_t o = 0;
    for (int ch = 0; ch < c; ++ch) {
        const std::size_t base = static_cast<std::size_t>(ch) * h * w;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x, ++o) {
                std::size_t best = base + static_cast<std::size_t>(2 * y) * w + 2 * x;
                const std::size_t cand[3] = {best + 1, best + w, best + w + 1};
                for (std::size_t k : cand)
                    if (input.values[k] > input.values[best]) best = k;
                out.values[o] = input.values[best];
                if (argmax) (*argmax)[o] = best;
            }
        }
    }
    return out;
}

Tensor adaptive_max_pool_1(const Tensor& input, std::vector<std::size_t>* argmax) {
    check_chw(input, "adaptive_max_pool_1");
    const int c = input.dim(0);
    const std::size_t hw = static_cast<std::size_t>(input.dim(1)) * input.dim(2);
    Tensor out({c});
    if (argmax) argmax->assign(static_cast<std::size_t>(c), 0);
    for (int ch = 0; ch < c; ++ch) {
        const std::size_t base = static_cast<std::size_t>(ch) * hw;
        std::size_t best = base;
        for (std::size_t i = 1; i < hw; ++i)
            if (input.values[base + i] > input.values[best]) best = base + i;
        out.values[static_cast<std::size_t>(ch)] = input.values[best];
        if (argmax) (*argmax)[static_cast<std::size_t>(ch)] = best;
    }
    return out;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ForwardCache forward_pass(const NetParams& params, const Tensor& image, PassMode mode, std::uint64_t dropout_seed,
                          std::span<const double> dropout_rates) {
    check_chw(image, "forward_pass");
    const auto& arch = params.arch();
    if (image.dim(0) != arch.input_channels)
        fail_invalid("forward_pass: input has " + std::to_string(image.dim(0)) + " channels, model expects " +
                     std::to_string(arch.input_channels));
    const std::size_t blocks = params.conv().size();
    {
        int h = image.dim(1), w = image.dim(2);
        for (std::size_t b = 0; b + 1 < blocks; ++b) {
            if (h % 2 != 0 || w % 2 != 0) fail_invalid("forward_pass: input size incompatible with the pooling plan");
            h /= 2;
            w /= 2;
        }
    }
    if (mode == PassMode::train && !dropout_rates.empty() && dropout_rates.size() != params.linear().size())
        fail_invalid("forward_pass: one dropout rate per linear layer is required");

    ForwardCache cache;
    cache.block_input.reserve(blocks);
    cache.block_activation.reserve(blocks);
    cache.pool_argmax.resize(blocks);
    Tensor x = image;
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto& l = params.conv()[b];
        Tensor act = conv2d(x, params.weights(l), params.bias(l), l.out);
        for (double& v : act.values) v = v > 0.0 ? v : 0.0;
        cache.block_input.push_back(std::move(x));
        if (b + 1 < blocks) {
            x = max_pool2(act, &cache.pool_argmax[b]);
        } else {
            Tensor f = adaptive_max_pool_1(act, &cache.pool_argmax[b]);
            cache.features = std::move(f.values);
        }
        cache.block_activation.push_back(std::move(act));
    }

    Rng rng(dropout_seed);
    std::vector<double> h = cache.features;
    const std::size_t layers = params.linear().size();
    cache.dropout_scale.resize(layers);
    for (std::size_t li = 0; li < layers; ++li) {
        const auto& l = params.linear()[li];
        if (mode == PassMode::train && !dropout_rates.empty()) {
            const double p = dropout_rates[li];
            require(p >= 0.0 && p < 1.0, "dropout rates must lie in [0, 1)");
            auto& scale = cache.dropout_scale[li];
            scale.resize(h.size());
            for (std::size_t i = 0; i < h.size(); ++i) {
                scale[i] = rng.uniform() < p ? 0.0 : 1.0 / (1.0 - p);
                h[i] *= scale[i];
            }
        }
        std::vector<double> z(static_cast<std::size_t>(l.out));
        ConstMatMap wm(params.weights(l).data(), l.out, l.in);
        ConstVecMap hv(h.data(), l.in);
        ConstVecMap bv(params.bias(l).data(), l.out);
        VecMap zv(z.data(), l.out);
        zv.noalias() = wm * hv + bv;
        cache.head_input.push_back(h);
        cache.head_output.push_back(z);
        if (li + 1 < layers) {
            h = z;
            for (double& v : h) v = v > 0.0 ? v : 0.0;
        }
    }
    cache.logit = cache.head_output.back()[0];
    cache.probability = sigmoid(cache.logit);
    cache.valid = true;
    return cache;
}

double bce_loss(double p, int y) {
    const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return -(y * std::log(pc) + (1 - y) * std::log(1.0 - pc));
}

double bce_loss(std::span<const double> p, std::span<const int> y) {
    require(!p.empty() && p.size() == y.size(), "bce_loss: equal-length nonempty batches required");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += bce_loss(p[i], y[i]);
    return acc / static_cast<double>(p.size());
}

namespace {

void check_cache(const NetParams& params, const ForwardCache& cache) {
    if (!cache.valid || cache.block_activation.size() != params.conv().size() ||
        cache.head_output.size() != params.linear().size())
        fail_invalid("backward: forward cache is missing or does not belong to these parameters");
}

void reverse_pass(const NetParams& params, const ForwardCache& cache, double upstream, NetParams* grads,
                  bool guided, int target_block, LogitGradients* out) {
    check_cache(params, cache);
    const std::size_t layers = params.linear().size();
    const std::size_t blocks = params.conv().size();
    auto gate = [guided](double fwd, double g) { return (fwd > 0.0 && (!guided || g > 0.0)) ? g : 0.0; };

    std::vector<double> g{upstream};
    for (std::size_t li = layers; li-- > 0;) {
        const auto& l = params.linear()[li];
        const auto& x = cache.head_input[li];
        if (grads) {
            MatMap gw(grads->weights(l).data(), l.out, l.in);
            ConstVecMap gv(g.data(), l.out);
            ConstVecMap xv(x.data(), l.in);
            gw.noalias() += gv * xv.transpose();
            VecMap(grads->bias(l).data(), l.out) += gv;
        }
        std::vector<double> gx(static_cast<std::size_t>(l.in));
        ConstMatMap wm(params.weights(l).data(), l.out, l.in);
        VecMap(gx.data(), l.in).noalias() = wm.transpose() * ConstVecMap(g.data(), l.out);
        const auto& scale = cache.dropout_scale[li];
        if (!scale.empty())
            for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= scale[i];
        if (li > 0) {
            const auto& z = cache.head_output[li - 1];
            for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = gate(z[i], gx[i]);
        }
        g = std::move(gx);
    }
    if (out) {
        out->features = g;
        if (target_block == static_cast<int>(blocks) - 1)
            out->block_output = Tensor({static_cast<int>(g.size())}, g);
    }
    if (!grads && target_block < 0) return;
    if (!grads && target_block == static_cast<int>(blocks) - 1) return;

    // Route through the global pool.
    Tensor gact(cache.block_activation.back().shape);
    for (std::size_t c = 0; c < g.size(); ++c) gact.values[cache.pool_argmax.back()[c]] += g[c];

    std::vector<double> col;
    for (std::size_t b = blocks; b-- > 0;) {
        const auto& l = params.conv()[b];
        const Tensor& act = cache.block_activation[b];
        const Tensor& in = cache.block_input[b];
        for (std::size_t i = 0; i < gact.size(); ++i) gact.values[i] = gate(act.values[i], gact.values[i]);
        const int c = in.dim(0), h = in.dim(1), w = in.dim(2);
        const auto hw = static_cast<Eigen::Index>(h) * w;
        ConstMatMap gm(gact.values.data(), l.out, hw);
        const bool need_input_grad = b > 0 && (grads || static_cast<int>(b) - 1 >= target_block);
        if (grads) {
            col.resize(static_cast<std::size_t>(c) * 9 * static_cast<std::size_t>(hw));
            im2col(in.values.data(), c, h, w, col.data());
            ConstMatMap cm(col.data(), c * 9, hw);
            MatMap(grads->weights(l).data(), l.out, c * 9).noalias() += gm * cm.transpose();
            // Plain loop: Eigen's vectorized sum peels by buffer alignment,
            // which would make the order (and the bits) vary between runs.
            auto gb = grads->bias(l);
            for (int o = 0; o < l.out; ++o) {
                const double* row = gact.values.data() + static_cast<std::size_t>(o) * hw;
                double s = 0.0;
                for (Eigen::Index i = 0; i < hw; ++i) s += row[i];
                gb[static_cast<std::size_t>(o)] += s;
            }
        }
        if (!need_input_grad) break;
        col.resize(static_cast<std::size_t>(c) * 9 * static_cast<std::size_t>(hw));
        MatMap gcol(col.data(), c * 9, hw);
        gcol.noalias() = ConstMatMap(params.weights(l).data(), l.out, c * 9).transpose() * gm;
        Tensor gin(in.shape);
        col2im(col.data(), c, h, w, gin.values.data());
        if (out && static_cast<int>(b) - 1 == target_block) {
            out->block_output = gin;
            if (!grads) return;
        }
        // Undo the 2x2 pool of block b-1.
        Tensor prev(cache.block_activation[b - 1].shape);
        const auto& am = cache.pool_argmax[b - 1];
        for (std::size_t i = 0; i < gin.size(); ++i) prev.values[am[i]] += gin.values[i];
        gact = std::move(prev);
    }
}

}  // namespace

void backward(const NetParams& params, const ForwardCache& cache, int y, NetParams& grads) {
    require(y == 0 || y == 1, "backward: label must be 0 or 1");
    backward_from_logit(params, cache, cache.probability - y, grads);
}

void backward_from_logit(const NetParams& params, const ForwardCache& cache, double upstream, NetParams& grads) {
    if (!params.same_layout(grads)) fail_invalid("backward: gradient buffer layout differs from the parameters");
    reverse_pass(params, cache, upstream, &grads, false, -1, nullptr);
}

LogitGradients logit_gradients(const NetParams& params, const ForwardCache& cache, bool guided, int target_block) {
    require(target_block < static_cast<int>(params.conv().size()), "target block out of range");
    LogitGradients out;
    reverse_pass(params, cache, 1.0, nullptr, guided, target_block, &out);
    return out;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamConfig& config) {
    if (grads.size() != params.size()) fail_invalid("adam_step: gradient size differs from parameter size");
    if (state.m.empty() && state.v.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size() || state.v.size() != params.size())
        fail_invalid("adam_step: optimizer state size differs from parameter size");
    ++state.step;
    const double b1 = config.beta1, b2 = config.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double mh = state.m[i] / c1;
        const double vh = state.v[i] / c2;
        params[i] -= config.learning_rate * mh / (std::sqrt(vh) + config.epsilon);
    }
}

std::string encode_model(const NetParams& params) {
    ByteWriter w;
    w.bytes("QCN1");
    w.u8(static_cast<std::uint8_t>(params.mode()));
    w.u32(static_cast<std::uint32_t>(params.conv().size()));
    for (const auto& l : params.conv()) {
        w.u32(static_cast<std::uint32_t>(l.out));
        w.u32(static_cast<std::uint32_t>(l.in));
        w.u32(3);
        w.u32(3);
    }
    w.u32(static_cast<std::uint32_t>(params.linear().size()));
    for (const auto& l : params.linear()) {
        w.u32(static_cast<std::uint32_t>(l.out));
        w.u32(static_cast<std::uint32_t>(l.in));
    }
    for (double v : params.data()) w.f64(v);
    w.u32(crc32_of(w.data()));
    return std::move(w.data());
}

NetParams decode_model(std::string_view data, const std::string& context) {
    if (data.size() < 8) fail_io(context + ": truncated model");
    const std::string_view body = data.substr(0, data.size() - 4);
    ByteReader tail(data.substr(data.size() - 4), context);
    if (tail.u32() != crc32_of(body)) fail_io(context + ": CRC32 mismatch");

    ByteReader r(body, context);
    if (r.bytes(4) != "QCN1") fail_io(context + ": bad magic, expected QCN1");
    const auto mode_byte = r.u8();
    if (mode_byte > 2) fail_io(context + ": unknown input mode byte");
    const auto mode = static_cast<InputMode>(mode_byte);
    Architecture arch;
    arch.input_channels = channels_of(mode);
    const auto nconv = r.u32();
    if (nconv == 0 || nconv > 64) fail_io(context + ": implausible conv layer count");
    int prev = arch.input_channels;
    for (std::uint32_t i = 0; i < nconv; ++i) {
        const auto out = r.u32(), in = r.u32(), kh = r.u32(), kw = r.u32();
        if (kh != 3 || kw != 3) fail_io(context + ": only 3x3 kernels are supported");
        if (static_cast<int>(in) != prev || out == 0 || out > 65536) fail_io(context + ": inconsistent conv shapes");
        arch.conv_channels.push_back(static_cast<int>(out));
        prev = static_cast<int>(out);
    }
    const auto nlin = r.u32();
    if (nlin == 0 || nlin > 64) fail_io(context + ": implausible linear layer count");
    for (std::uint32_t i = 0; i < nlin; ++i) {
        const auto out = r.u32(), in = r.u32();
        if (static_cast<int>(in) != prev || out == 0 || out > 65536) fail_io(context + ": inconsistent linear shapes");
        arch.linear_sizes.push_back(static_cast<int>(out));
        prev = static_cast<int>(out);
    }
    if (arch.linear_sizes.back() != 1) fail_io(context + ": head must end in one output");
    NetParams p(arch, mode);
    if (r.remaining() != p.data().size() * 8) fail_io(context + ": parameter payload size mismatch");
    for (double& v : p.data()) {
        v = r.f64();
        if (!std::isfinite(v)) fail_io(context + ": non-finite parameter");
    }
    return p;
}

void save_model(const std::filesystem::path& path, const NetParams& params) {
    write_file(path, encode_model(params));
}

NetParams load_model(const std::filesystem::path& path) { return decode_model(read_file(path), path.string()); }

}  // namespace odtqc
