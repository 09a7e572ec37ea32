#include "saliency.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace odtqc {

namespace {

constexpr int kGuidedBlock = 1;

RealImage to_output_size(const RealImage& m, int size) { return bilinear_upsample(m, size, size); }

SaliencyMap finish(const RealImage& raw) {
    SaliencyMap out;
    out.map = normalize_minmax(raw);
    out.degenerate = std::all_of(out.map.values.begin(), out.map.values.end(), [](double v) { return v == 0.0; });
    return out;
}

}  // namespace

RealImage bilinear_upsample(const RealImage& map, int width, int height) {
    require(map.width >= 1 && map.height >= 1 && map.values.size() == static_cast<std::size_t>(map.width) * map.height,
            "bilinear_upsample: malformed map");
    if (width < map.width || height < map.height) fail_invalid("bilinear_upsample: downsampling is not supported");
    RealImage out{width, height, std::vector<double>(static_cast<std::size_t>(width) * height)};
    auto coord = [](int i, int n_out, int n_in) {
        return n_out == 1 ? 0.0 : static_cast<double>(i) * (n_in - 1) / (n_out - 1);
    };
    for (int y = 0; y < height; ++y) {
        const double sy = coord(y, height, map.height);
        const int y0 = std::min(static_cast<int>(sy), map.height - 1), y1 = std::min(y0 + 1, map.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < width; ++x) {
            const double sx = coord(x, width, map.width);
            const int x0 = std::min(static_cast<int>(sx), map.width - 1), x1 = std::min(x0 + 1, map.width - 1);
            const double fx = sx - x0;
            auto at = [&](int xx, int yy) { return map.values[static_cast<std::size_t>(yy) * map.width + xx]; };
            double v = (1 - fx) * (1 - fy) * at(x0, y0);
            if (fx != 0.0) v += fx * (1 - fy) * at(x1, y0);
            if (fy != 0.0) v += (1 - fx) * fy * at(x0, y1);
            if (fx != 0.0 && fy != 0.0) v += fx * fy * at(x1, y1);
            out.values[static_cast<std::size_t>(y) * width + x] = v;
        }
    }
    return out;
}

RealImage normalize_minmax(const RealImage& map) {
    RealImage out = map;
    if (map.values.empty()) return out;
    const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    const double a = *lo, span = *hi - *lo;
    for (double& v : out.values) v = span > 0.0 ? std::clamp((v - a) / span, 0.0, 1.0) : 0.0;
    return out;
}

RealImage cam_raw(const NetParams& params, const Tensor& input) {
    const ForwardCache cache = forward_pass(params, input, PassMode::eval, 0);
    const LogitGradients g = logit_gradients(params, cache, false, -1);
    const Tensor& act = cache.block_activation.back();
    const int c = act.dim(0), h = act.dim(1), w = act.dim(2);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    RealImage out{w, h, std::vector<double>(plane, 0.0)};
    for (int k = 0; k < c; ++k) {
        const double weight = g.features[static_cast<std::size_t>(k)];
        if (weight == 0.0) continue;
        const double* a = act.values.data() + static_cast<std::size_t>(k) * plane;
        for (std::size_t i = 0; i < plane; ++i) out.values[i] += weight * a[i];
    }
    for (double& v : out.values) v = std::max(v, 0.0);
    return out;
}

SaliencyMap cam_map(const NetParams& params, const Tensor& input) {
    return finish(to_output_size(cam_raw(params, input), input.dim(1)));
}

RealImage guided_raw(const NetParams& params, const Tensor& input) {
    require(params.conv().size() > kGuidedBlock + 1, "guided_backprop: network needs more than two conv blocks");
    const ForwardCache cache = forward_pass(params, input, PassMode::eval, 0);
    const LogitGradients g = logit_gradients(params, cache, true, kGuidedBlock);
    const Tensor& t = g.block_output;
    const int c = t.dim(0), h = t.dim(1), w = t.dim(2);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    RealImage out{w, h, std::vector<double>(plane, 0.0)};
    for (int k = 0; k < c; ++k) {
        const double* a = t.values.data() + static_cast<std::size_t>(k) * plane;
        for (std::size_t i = 0; i < plane; ++i) out.values[i] = std::max(out.values[i], std::abs(a[i]));
    }
    return out;
}

SaliencyMap guided_backprop(const NetParams& params, const Tensor& input) {
    return finish(to_output_size(guided_raw(params, input), input.dim(1)));
}

RealImage grad_cam_product(const RealImage& cam, const RealImage& guided) {
    if (cam.width != guided.width || cam.height != guided.height || cam.values.size() != guided.values.size())
        fail_invalid("grad_cam: map shapes differ");
    RealImage out = cam;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = cam.values[i] * guided.values[i];
    return out;
}

SaliencyMap grad_cam(const RealImage& cam, const RealImage& guided) { return finish(grad_cam_product(cam, guided)); }

SaliencyMethod parse_saliency_method(const std::string& name) {
    if (name == "cam") return SaliencyMethod::cam;
    if (name == "guidedbp") return SaliencyMethod::guided;
    if (name == "gradcam") return SaliencyMethod::gradcam;
    fail_invalid("unknown saliency method '" + name + "' (expected cam, guidedbp or gradcam)");
}

const char* saliency_method_name(SaliencyMethod m) {
    switch (m) {
        case SaliencyMethod::cam: return "cam";
        case SaliencyMethod::guided: return "guidedbp";
        case SaliencyMethod::gradcam: return "gradcam";
    }
    return "?";
}

SaliencyMap saliency(const NetParams& params, const Tensor& input, SaliencyMethod method) {
    switch (method) {
        case SaliencyMethod::cam: return cam_map(params, input);
        case SaliencyMethod::guided: return guided_backprop(params, input);
        case SaliencyMethod::gradcam: break;
    }
    return grad_cam(cam_map(params, input).map, guided_backprop(params, input).map);
}

}  // namespace odtqc
