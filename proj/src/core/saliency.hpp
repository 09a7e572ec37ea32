#pragma once

#include "field.hpp"
#include "net.hpp"
#include "tensor.hpp"

namespace odtqc {

struct SaliencyMap {
    RealImage map;          // 128x128, values in [0, 1]
    bool degenerate = false;  // set when the raw map had no spread (all zeros after normalization)
};

// Align-corners bilinear resampling to a larger or equal grid.
RealImage bilinear_upsample(const RealImage& map, int width, int height);

// Min-max normalization to [0, 1]; a constant map becomes all zeros.
RealImage normalize_minmax(const RealImage& map);

// Raw CAM before upsampling: C6 maps weighted by d logit / d pooled channel, summed, ReLU'd.
RealImage cam_raw(const NetParams& params, const Tensor& input);
SaliencyMap cam_map(const NetParams& params, const Tensor& input);

// Guided backprop to the pooled output of the second conv block, reduced by channelwise max |g|.
RealImage guided_raw(const NetParams& params, const Tensor& input);
SaliencyMap guided_backprop(const NetParams& params, const Tensor& input);

// Pointwise product of two maps, before normalization.
RealImage grad_cam_product(const RealImage& cam, const RealImage& guided);
SaliencyMap grad_cam(const RealImage& cam, const RealImage& guided);

enum class SaliencyMethod { cam, guided, gradcam };
SaliencyMethod parse_saliency_method(const std::string& name);
const char* saliency_method_name(SaliencyMethod m);

SaliencyMap saliency(const NetParams& params, const Tensor& input, SaliencyMethod method);

}  // namespace odtqc
