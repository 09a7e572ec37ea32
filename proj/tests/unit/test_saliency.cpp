#include <doctest.h>

#include "classifier.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "saliency.hpp"

using namespace odtqc;

namespace {

void check_range(const RealImage& m) {
    CHECK(m.width == 128);
    CHECK(m.height == 128);
    for (double v : m.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

Tensor random_input(std::uint64_t seed) {
    Tensor t({1, 128, 128});
    Rng r(seed);
    for (double& v : t.values) v = r.normal();
    return t;
}

}  // namespace

TEST_CASE("bilinear upsample examples") {
    const RealImage m(2, 2, {0, 1, 2, 3});
    const auto u = bilinear_upsample(m, 3, 3);
    CHECK(u.at(1, 1) == doctest::Approx(1.5));
    CHECK(u.at(0, 0) == 0);
    CHECK(u.at(2, 2) == 3);
    CHECK(u.at(2, 0) == 1);
    CHECK(bilinear_upsample(m, 2, 2).values == m.values);
    for (double v : bilinear_upsample(RealImage(4, 4, 0.7), 128, 128).values) CHECK(v == doctest::Approx(0.7));
    CHECK_THROWS_AS(bilinear_upsample(RealImage(4, 4), 2, 8), Error);
}

TEST_CASE("normalization and product") {
    for (double v : normalize_minmax(RealImage(3, 3, 2.0)).values) CHECK(v == 0.0);
    const auto n = normalize_minmax(RealImage(2, 1, {-1.0, 3.0}));
    CHECK(n.values == std::vector<double>{0.0, 1.0});

    Rng r(1);
    RealImage a(128, 128), b(128, 128);
    for (double& v : a.values) v = r.uniform();
    for (double& v : b.values) v = r.uniform();
    const auto p = grad_cam_product(a, b);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.values[i] == a.values[i] * b.values[i]);
    const auto ones = grad_cam(RealImage(128, 128, 1.0), b);
    CHECK(ones.map.values == normalize_minmax(b).values);
    const auto z = grad_cam(RealImage(128, 128, 0.0), b);
    CHECK(z.degenerate);
    for (double v : z.map.values) CHECK(v == 0.0);
    CHECK_THROWS_AS(grad_cam(RealImage(4, 4), RealImage(4, 5)), Error);
}

TEST_CASE("saliency maps are 128x128 in [0, 1]") {
    const auto p = init_params(2, InputMode::phase);
    const auto x = random_input(3);
    for (auto m : {SaliencyMethod::cam, SaliencyMethod::guided, SaliencyMethod::gradcam}) check_range(saliency(p, x, m).map);
    CHECK(parse_saliency_method("guidedbp") == SaliencyMethod::guided);
    CHECK(std::string(saliency_method_name(SaliencyMethod::gradcam)) == "gradcam");
    CHECK_THROWS_AS(parse_saliency_method("smoothgrad"), Error);
}

TEST_CASE("zero input gives uniform C6 maps and an all-zero CAM") {
    auto p = init_params(2, InputMode::phase);
    Rng r(4);
    for (const auto& l : p.conv())
        for (double& b : p.bias(l)) b = 0.05 * r.uniform();
    const auto s = cam_map(p, Tensor({1, 128, 128}));
    CHECK(s.degenerate);
    for (double v : s.map.values) CHECK(v == 0.0);
}

TEST_CASE("CAM with a head reading one channel follows that channel") {
    auto p = init_params(6, InputMode::phase);
    Rng r(5);
    for (const auto& l : p.conv())
        for (double& b : p.bias(l)) b = 0.05 * r.uniform();
    // Head: logit = feature[7] through identity-like ReLU path.
    for (const auto& l : p.linear()) {
        auto w = p.weights(l);
        std::fill(w.begin(), w.end(), 0.0);
        std::fill(p.bias(l).begin(), p.bias(l).end(), 0.0);
    }
    p.weights(p.linear()[0])[7] = 1.0;                // unit 0 <- feature 7
    p.weights(p.linear()[1])[0] = 1.0;                // unit 0 <- unit 0
    p.weights(p.linear()[2])[0] = 1.0;                // logit <- unit 0
    const auto x = random_input(8);
    const auto cache = forward_pass(p, x, PassMode::eval, 0);
    REQUIRE(cache.features[7] > 0.0);
    const auto raw = cam_raw(p, x);
    const auto& act = cache.block_activation.back();
    REQUIRE(raw.width == 4);
    for (int i = 0; i < 16; ++i) CHECK(raw.values[i] == doctest::Approx(act.values[7 * 16 + i]));
    const auto lg = logit_gradients(p, cache, false, -1);
    for (std::size_t c = 0; c < lg.features.size(); ++c) CHECK(lg.features[c] == (c == 7 ? 1.0 : 0.0));
}

TEST_CASE("guided backprop gates") {
    // Gates all open: guided equals plain gradient.
    auto p = init_params(7, InputMode::phase);
    for (const auto& l : p.conv()) {
        for (double& w : p.weights(l)) w = std::abs(w);
        for (double& b : p.bias(l)) b = 0.01;
    }
    for (const auto& l : p.linear()) {
        for (double& w : p.weights(l)) w = std::abs(w);
        for (double& b : p.bias(l)) b = 0.01;
    }
    Tensor x({1, 128, 128});
    Rng r(2);
    for (double& v : x.values) v = r.uniform(0.1, 1.0);
    const auto cache = forward_pass(p, x, PassMode::eval, 0);
    const auto g = logit_gradients(p, cache, true, 1), plain = logit_gradients(p, cache, false, 1);
    CHECK(g.block_output.values == plain.block_output.values);
    CHECK(g.features == plain.features);

    // A negative weight into the logit closes that path for guided BP.
    auto q = p;
    auto w3 = q.weights(q.linear()[2]);
    std::fill(w3.begin(), w3.end(), -1.0);
    const auto cq = forward_pass(q, x, PassMode::eval, 0);
    const auto gq = logit_gradients(q, cq, true, 1);
    for (double v : gq.block_output.values) CHECK(v == 0.0);
}
