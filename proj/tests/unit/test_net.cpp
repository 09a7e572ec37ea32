#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "helpers.hpp"
#include "io.hpp"
#include "net.hpp"
#include "../common/oracle.hpp"

using namespace odtqc;

namespace {

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    Rng r(seed);
    for (double& v : t.values) v = r.normal();
    return t;
}

NetParams random_mini(std::uint64_t seed) {
    auto p = init_params(seed, oracle::mini_architecture(), InputMode::phase);
    Rng r(seed + 100);
    for (const auto& l : p.conv())
        for (double& b : p.bias(l)) b = 0.1 * r.normal();
    for (const auto& l : p.linear())
        for (double& b : p.bias(l)) b = 0.1 * r.normal();
    return p;
}

}  // namespace

TEST_CASE("conv2d examples") {
    const auto in = random_tensor({1, 6, 7}, 1);
    std::vector<double> delta(9, 0.0);
    delta[4] = 1.0;
    const std::vector<double> zero{0.0};
    CHECK(conv2d(in, delta, zero, 1).values == in.values);

    Tensor c({1, 5, 5}, 2.5);
    const std::vector<double> ones(9, 1.0), bias{0.25};
    const auto s = conv2d(c, ones, bias, 1);
    CHECK(s.values[2 * 5 + 2] == doctest::Approx(9 * 2.5 + 0.25));

    // Six nested loops.
    const auto x = random_tensor({2, 5, 5}, 3);
    const auto w = random_tensor({3, 2, 3, 3}, 4);
    const auto b = random_tensor({3}, 5);
    const auto got = conv2d(x, w.values, b.values, 3);
    REQUIRE(got.shape == std::vector<int>{3, 5, 5});
    double worst = 0;
    for (int o = 0; o < 3; ++o)
        for (int y = 0; y < 5; ++y)
            for (int xx = 0; xx < 5; ++xx) {
                double ref = b.values[o];
                for (int ci = 0; ci < 2; ++ci)
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx) {
                            const int sy = y + ky - 1, sx = xx + kx - 1;
                            if (sy < 0 || sy > 4 || sx < 0 || sx > 4) continue;
                            ref += w.values[((o * 2 + ci) * 3 + ky) * 3 + kx] * x.values[(ci * 5 + sy) * 5 + sx];
                        }
                worst = std::max(worst, std::abs(ref - got.values[(o * 5 + y) * 5 + xx]));
            }
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(conv2d(x, w.values, b.values, 2), Error);
}

TEST_CASE("pooling examples") {
    Tensor c({2, 4, 4}, -1.5);
    for (double v : max_pool2(c).values) CHECK(v == -1.5);
    const auto x = random_tensor({1, 4, 4}, 6);
    const auto p = max_pool2(x);
    for (int y = 0; y < 2; ++y)
        for (int xx = 0; xx < 2; ++xx) {
            const double m = std::max({x.values[(2 * y) * 4 + 2 * xx], x.values[(2 * y) * 4 + 2 * xx + 1],
                                       x.values[(2 * y + 1) * 4 + 2 * xx], x.values[(2 * y + 1) * 4 + 2 * xx + 1]});
            CHECK(p.values[y * 2 + xx] == m);
        }
    CHECK_THROWS_AS(max_pool2(Tensor({1, 3, 4})), Error);

    Tensor t({1024, 4, 4});
    Rng r(2);
    for (double& v : t.values) v = r.normal();
    const auto g = adaptive_max_pool_1(t);
    REQUIRE(g.shape == std::vector<int>{1024});
    for (int ch = 0; ch < 1024; ++ch)
        CHECK(g.values[ch] == *std::max_element(t.values.begin() + ch * 16, t.values.begin() + ch * 16 + 16));
}

TEST_CASE("standard architecture shapes on a 128x128 phase image") {
    const auto p = init_params(1, InputMode::phase);
    const auto cache = forward_pass(p, random_tensor({1, 128, 128}, 1), PassMode::eval, 0);
    const std::vector<std::vector<int>> pooled = {{32, 64, 64}, {64, 32, 32}, {128, 16, 16}, {256, 8, 8}, {512, 4, 4}};
    for (std::size_t b = 0; b < pooled.size(); ++b) CHECK(cache.block_input[b + 1].shape == pooled[b]);
    CHECK(cache.block_activation[5].shape == std::vector<int>{1024, 4, 4});
    CHECK(cache.features.size() == 1024);
    CHECK(cache.probability > 0.0);
    CHECK(cache.probability < 1.0);
    CHECK(channels_of(InputMode::complex) == 2);
    CHECK_THROWS_AS(forward_pass(p, random_tensor({2, 128, 128}, 1), PassMode::eval, 0), Error);
}

TEST_CASE("initialization statistics") {
    const auto a = init_params(11, InputMode::phase), b = init_params(11, InputMode::phase);
    CHECK(encode_model(a) == encode_model(b));
    const auto w = a.weights(a.conv()[0]);
    double s2 = 0;
    for (double v : w) s2 += v * v;
    const double sd = std::sqrt(s2 / static_cast<double>(w.size()));
    CHECK(std::abs(sd - std::sqrt(2.0 / 9.0)) / std::sqrt(2.0 / 9.0) < 0.15);
    const double bound = std::sqrt(6.0 / 513.0);
    for (double v : a.weights(a.linear()[2])) CHECK(std::abs(v) <= bound);
    for (const auto& l : a.conv())
        for (double v : a.bias(l)) CHECK(v == 0.0);
}

TEST_CASE("forward pass matches the long-double oracle") {
    const auto p = random_mini(3);
    const auto x = random_tensor({1, 8, 8}, 4);
    const auto c1 = forward_pass(p, x, PassMode::eval, 0), c2 = forward_pass(p, x, PassMode::eval, 99);
    CHECK(c1.probability == c2.probability);
    const std::vector<oracle::ld> theta(p.data().begin(), p.data().end());
    const auto ref = oracle::forward(p, theta, x, 1);
    CHECK(std::abs(c1.logit - static_cast<double>(ref.logit)) < 1e-12);
    const double pr = static_cast<double>(1 / (1 + std::exp(-ref.logit)));
    CHECK(std::abs(c1.probability - pr) < 1e-12);
}

TEST_CASE("zero network") {
    const NetParams z(Architecture::standard(InputMode::phase), InputMode::phase);
    const auto cache = forward_pass(z, random_tensor({1, 128, 128}, 2), PassMode::eval, 0);
    CHECK(cache.probability == 0.5);
    auto g = z.zeros_like();
    backward(z, cache, 1, g);
    CHECK(g.bias(g.linear().back())[0] == -0.5);
}

TEST_CASE("bce examples") {
    CHECK(bce_loss(0.5, 0) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(bce_loss(0.5, 1) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(bce_loss(0.9, 1) == doctest::Approx(0.105361).epsilon(1e-5));
    const std::vector<double> p{0.5, 0.9};
    const std::vector<int> y{1, 1};
    CHECK(bce_loss(p, y) == doctest::Approx(0.399254).epsilon(1e-5));
    CHECK(std::isfinite(bce_loss(0.0, 1)));
    CHECK(bce_loss(0.0, 1) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("gradients match long-double central differences") {
    for (std::uint64_t draw = 0; draw < 2; ++draw) {
        const auto p = random_mini(draw + 20);
        const auto x = random_tensor({1, 16, 16}, draw + 40);
        const int y = static_cast<int>(draw % 2);
        const auto cache = forward_pass(p, x, PassMode::eval, 0);
        auto g = p.zeros_like();
        backward(p, cache, y, g);
        const auto r = oracle::check_gradients(p, x, y, g.data());
        CHECK(r.worst_rel < 1e-6);
        CHECK(r.skipped * 100 < r.checked);
    }
}

TEST_CASE("dropped units have exactly zero gradient; eval ignores dropout") {
    const auto p = random_mini(5);
    const auto x = random_tensor({1, 16, 16}, 6);
    const std::vector<double> rates{0.5, 0.5, 0.5};
    const auto cache = forward_pass(p, x, PassMode::train, 1234, rates);
    auto g = p.zeros_like();
    backward(p, cache, 1, g);
    const auto& l1 = p.linear()[0];
    std::size_t dropped = 0;
    for (int i = 0; i < l1.in; ++i)
        if (cache.dropout_scale[0][i] == 0.0) {
            ++dropped;
            for (int o = 0; o < l1.out; ++o) CHECK(g.weights(l1)[static_cast<std::size_t>(o) * l1.in + i] == 0.0);
        }
    CHECK(dropped > 0);
    const auto e1 = forward_pass(p, x, PassMode::eval, 1, rates), e2 = forward_pass(p, x, PassMode::eval, 2);
    CHECK(e1.probability == e2.probability);
    CHECK_THROWS_AS(backward(p, ForwardCache{}, 1, g), Error);
}

TEST_CASE("adam examples") {
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    std::vector<double> theta{1.0, -2.0};
    AdamState s;
    const std::vector<double> zero{0.0, 0.0};
    adam_step(theta, zero, s, cfg);
    CHECK(theta == std::vector<double>{1.0, -2.0});

    AdamState s1;
    std::vector<double> one{0.3};
    const std::vector<double> g1{-4.0};
    adam_step(one, g1, s1, cfg);
    CHECK(one[0] == doctest::Approx(0.3 + 0.1).epsilon(1e-8));

    // f = theta^2 from 1, hand-stepped.
    std::vector<double> t{1.0};
    AdamState st;
    double m = 0, v = 0, ref = 1.0;
    for (int k = 1; k <= 5; ++k) {
        const double g = 2 * ref;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1 - std::pow(0.9, k)), vh = v / (1 - std::pow(0.999, k));
        ref -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
        const std::vector<double> gg{2 * t[0]};
        adam_step(t, gg, st, cfg);
        CHECK(std::abs(t[0] - ref) < 1e-12);
    }
    CHECK(st.step == 5);
    CHECK_THROWS_AS(adam_step(t, std::vector<double>{1.0, 2.0}, st, cfg), Error);
}

TEST_CASE("QCN1 round trip and corruption") {
    const auto p = random_mini(9);
    const auto bytes = encode_model(p);
    CHECK(bytes.substr(0, 4) == "QCN1");
    const auto q = decode_model(bytes);
    CHECK(q.data() == p.data());
    CHECK(q.same_layout(p));
    const auto dir = testing::scratch("model");
    save_model(dir / "m.qcn", p);
    CHECK(load_model(dir / "m.qcn").data() == p.data());
    auto bad = bytes;
    bad[40] ^= 1;
    CHECK_THROWS_AS(decode_model(bad), Error);
    CHECK_THROWS_AS(decode_model(bytes.substr(0, 20)), Error);
    CHECK_THROWS_AS(load_model(dir / "missing.qcn"), Error);
}
