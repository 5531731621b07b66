#include <doctest.h>

#include <cmath>
#include <numeric>

#include "adcnn/error.hpp"
#include "adcnn/layers.hpp"
#include "adcnn/network.hpp"
#include "adcnn/rng.hpp"
#include "oracles.hpp"

using namespace adcnn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = 0.0,
                     double hi = 1.0) {
    Tensor t(std::move(shape));
    for (auto& v : t.data) v = lo + (hi - lo) * rng.uniform01();
    return t;
}

FilterBank random_filters(std::size_t k, std::size_t in, std::size_t out, Rng& rng) {
    FilterBank f(k, in, out);
    for (auto& w : f.weights.data) w = rng.uniform01() - 0.5;
    for (auto& b : f.bias.data) b = rng.uniform01() - 0.5;
    return f;
}

} // namespace

TEST_SUITE_BEGIN("tensor");

TEST_CASE("conv2d 1x1 identity filter") {
    Tensor input({1, 1, 1}, {0.37});
    FilterBank f(1, 1, 1);
    f.weights[0] = 1.0;
    const Tensor out = conv2d_forward(input, f);
    CHECK(out.shape == std::vector<std::size_t>{1, 1, 1});
    CHECK(out[0] == 0.37);
}

TEST_CASE("conv2d all-ones 3x3 under zero padding") {
    Tensor input({1, 3, 3}, std::vector<double>(9, 1.0));
    FilterBank f(3, 1, 1);
    for (auto& w : f.weights.data) w = 1.0;
    const Tensor out = conv2d_forward(input, f);
    CHECK(out.at(0, 1, 1) == 9.0);
    CHECK(out.at(0, 0, 0) == 4.0);
    CHECK(out.at(0, 0, 2) == 4.0);
    CHECK(out.at(0, 2, 0) == 4.0);
    CHECK(out.at(0, 2, 2) == 4.0);
}

TEST_CASE("conv2d matches the naive padded-loop reference") {
    Rng rng(42);
    Tensor input = random_tensor({2, 8, 8}, rng);
    FilterBank f = random_filters(5, 2, 4, rng);
    const Tensor fast = conv2d_forward(input, f);
    const Tensor slow = oracles::naive_conv2d(input, f);
    REQUIRE(fast.shape == slow.shape);
    for (std::size_t i = 0; i < fast.size(); ++i)
        CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
}

TEST_CASE("conv2d random-shape sweep against the reference") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t C = 1 + rng.uniform_below(4);
        const std::size_t F = 1 + rng.uniform_below(4);
        const std::size_t H = 1 + rng.uniform_below(16);
        const std::size_t W = 1 + rng.uniform_below(16);
        const std::size_t K = 1 + 2 * rng.uniform_below(3); // 1, 3, 5
        Tensor input = random_tensor({C, H, W}, rng, -1.0, 1.0);
        FilterBank f = random_filters(K, C, F, rng);
        const Tensor fast = conv2d_forward(input, f);
        const Tensor slow = oracles::naive_conv2d(input, f);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i)
            max_diff = std::max(max_diff, std::abs(fast[i] - slow[i]));
        CHECK(max_diff < 1e-12);
    }
}

TEST_CASE("conv2d rejects bad inputs") {
    Rng rng(1);
    Tensor input = random_tensor({2, 4, 4}, rng);
    FilterBank f = random_filters(3, 3, 1, rng); // channel mismatch
    CHECK_THROWS_AS(conv2d_forward(input, f), ShapeError);
    CHECK_THROWS_AS(FilterBank(4, 1, 1), ConfigError); // even kernel
}

TEST_CASE("conv2d forward is pure") {
    Rng rng(3);
    Tensor input = random_tensor({2, 6, 6}, rng);
    FilterBank f = random_filters(5, 2, 3, rng);
    const Tensor a = conv2d_forward(input, f);
    const Tensor b = conv2d_forward(input, f);
    CHECK(a.data == b.data);
}

TEST_CASE("conv2d backward zero upstream and bias sums") {
    Rng rng(11);
    Tensor input = random_tensor({2, 6, 6}, rng);
    FilterBank f = random_filters(3, 2, 3, rng);

    Tensor zeros({3, 6, 6});
    ConvGradients zg = conv2d_backward(input, f, zeros);
    for (double v : zg.weights.data) CHECK(v == 0.0);
    for (double v : zg.bias.data) CHECK(v == 0.0);
    for (double v : zg.input.data) CHECK(v == 0.0);

    Tensor upstream = random_tensor({3, 6, 6}, rng);
    ConvGradients g = conv2d_backward(input, f, upstream);
    for (std::size_t c = 0; c < 3; ++c) {
        double expected = 0.0;
        for (std::size_t i = 0; i < 36; ++i) expected += upstream.data[c * 36 + i];
        CHECK(g.bias[c] == doctest::Approx(expected).epsilon(1e-14));
    }

    Tensor bad({2, 6, 6});
    CHECK_THROWS_AS(conv2d_backward(input, f, bad), ShapeError);
}

TEST_CASE("conv2d gradients match central differences") {
    Rng rng(13);
    Tensor input = random_tensor({2, 5, 5}, rng, -1.0, 1.0);
    FilterBank f = random_filters(3, 2, 2, rng);
    Tensor coeff = random_tensor({2, 5, 5}, rng, -1.0, 1.0); // loss = sum(c * out)

    ConvGradients analytic = conv2d_backward(input, f, coeff);

    auto loss_weights = [&]() {
        const Tensor out = conv2d_forward(input, f);
        return std::inner_product(out.data.begin(), out.data.end(), coeff.data.begin(), 0.0);
    };
    double err = finite_difference_check(std::span<double>(f.weights.data),
                                         std::span<const double>(analytic.weights.data),
                                         loss_weights, 1e-5, 1000);
    CHECK(err < 1e-6);

    err = finite_difference_check(std::span<double>(f.bias.data),
                                  std::span<const double>(analytic.bias.data),
                                  loss_weights, 1e-5, 1000);
    CHECK(err < 1e-6);

    err = finite_difference_check(std::span<double>(input.data),
                                  std::span<const double>(analytic.input.data),
                                  loss_weights, 1e-5, 1000);
    CHECK(err < 1e-6);
}

TEST_CASE("maxpool basic window and tie-break") {
    Tensor input({1, 2, 2}, {1, 2, 3, 4});
    PoolResult r = maxpool_forward(input);
    CHECK(r.output.size() == 1);
    CHECK(r.output[0] == 4.0);
    CHECK(r.argmax.index[0] == 3); // position (1,1)

    Tensor constant({1, 4, 4}, std::vector<double>(16, 2.5));
    PoolResult c = maxpool_forward(constant);
    CHECK(c.output.size() == 4);
    // first occurrence in row-major order wins the tie: top-left of each window
    CHECK(c.argmax.index[0] == 0);
    CHECK(c.argmax.index[1] == 2);
    CHECK(c.argmax.index[2] == 8);
    CHECK(c.argmax.index[3] == 10);

    Tensor odd({1, 3, 4});
    CHECK_THROWS_AS(maxpool_forward(odd), ShapeError);
}

TEST_CASE("maxpool matches the per-window reference") {
    Rng rng(17);
    Tensor input = random_tensor({3, 16, 16}, rng);
    PoolResult r = maxpool_forward(input);
    const Tensor ref = oracles::naive_maxpool(input);
    CHECK(r.output.data == ref.data);
}

TEST_CASE("maxpool backward routes to the argmax only") {
    Tensor input({1, 2, 2}, {1, 2, 3, 4});
    PoolResult r = maxpool_forward(input);
    Tensor upstream({1, 1, 1}, {0.7});
    const Tensor grad = maxpool_backward(r.argmax, upstream);
    CHECK(grad.data == std::vector<double>{0, 0, 0, 0.7});
}

TEST_CASE("maxpool backward conserves gradient mass") {
    Rng rng(19);
    Tensor input = random_tensor({2, 8, 8}, rng);
    PoolResult r = maxpool_forward(input);
    // integer-valued upstream keeps every partial sum exact, so the
    // conservation check can demand equality
    Tensor upstream({2, 4, 4});
    for (auto& v : upstream.data) v = static_cast<double>(rng.uniform_below(16));
    const Tensor grad = maxpool_backward(r.argmax, upstream);
    const double in_sum = std::accumulate(grad.data.begin(), grad.data.end(), 0.0);
    const double up_sum = std::accumulate(upstream.data.begin(), upstream.data.end(), 0.0);
    CHECK(in_sum == up_sum);

    Tensor wrong({2, 3, 4});
    CHECK_THROWS_AS(maxpool_backward(r.argmax, wrong), ShapeError);
}

TEST_CASE("maxpool gradient matches central differences") {
    Rng rng(23);
    Tensor input = random_tensor({1, 6, 6}, rng);
    Tensor coeff = random_tensor({1, 3, 3}, rng, -1.0, 1.0);

    PoolResult base = maxpool_forward(input);
    const Tensor analytic = maxpool_backward(base.argmax, coeff);

    auto loss = [&]() {
        const PoolResult r = maxpool_forward(input);
        return std::inner_product(r.output.data.begin(), r.output.data.end(),
                                  coeff.data.begin(), 0.0);
    };
    const double err = finite_difference_check(std::span<double>(input.data),
                                               std::span<const double>(analytic.data),
                                               loss, 1e-5, 1000);
    CHECK(err < 1e-6);
}

TEST_CASE("dense forward identity and constant cases") {
    Tensor x({3}, {1.0, -2.0, 3.0});
    Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    Tensor zero_bias({3});
    CHECK(dense_forward(x, eye, zero_bias).data == x.data);

    Tensor zeros({2, 3});
    Tensor bias({2}, {0.5, -0.25});
    CHECK(dense_forward(x, zeros, bias).data == bias.data);

    Tensor short_x({2});
    CHECK_THROWS_AS(dense_forward(short_x, eye, zero_bias), ShapeError);
}

TEST_CASE("dense gradients match central differences") {
    Rng rng(29);
    Tensor x = random_tensor({6}, rng, -1.0, 1.0);
    Tensor w = random_tensor({4, 6}, rng, -1.0, 1.0);
    Tensor b = random_tensor({4}, rng, -1.0, 1.0);
    Tensor coeff = random_tensor({4}, rng, -1.0, 1.0);

    DenseGradients analytic = dense_backward(x, w, coeff);
    auto loss = [&]() {
        const Tensor y = dense_forward(x, w, b);
        return std::inner_product(y.data.begin(), y.data.end(), coeff.data.begin(), 0.0);
    };

    CHECK(finite_difference_check(std::span<double>(w.data),
                                  std::span<const double>(analytic.weights.data), loss,
                                  1e-5, 100) < 1e-6);
    CHECK(finite_difference_check(std::span<double>(b.data),
                                  std::span<const double>(analytic.bias.data), loss,
                                  1e-5, 100) < 1e-6);
    CHECK(finite_difference_check(std::span<double>(x.data),
                                  std::span<const double>(analytic.input.data), loss,
                                  1e-5, 100) < 1e-6);
}

TEST_CASE("relu values and gradient") {
    Tensor x({2}, {-1.0, 2.0});
    const Tensor y = relu(x);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 2.0);

    Tensor all_pos({3}, {0.5, 1.5, 2.5});
    CHECK(relu(all_pos).data == all_pos.data);
    Tensor upstream({3}, {1.0, -2.0, 3.0});
    CHECK(relu_backward(all_pos, upstream).data == upstream.data);

    Tensor at_zero({1}, {0.0});
    Tensor u({1}, {5.0});
    CHECK(relu_backward(at_zero, u)[0] == 0.0);
}

TEST_CASE("relu gradient matches central differences away from the kink") {
    Rng rng(31);
    Tensor x({40});
    for (auto& v : x.data) {
        // keep a 1e-3 margin around the kink
        do {
            v = 2.0 * rng.uniform01() - 1.0;
        } while (std::abs(v) < 1e-3);
    }
    Tensor coeff = random_tensor({40}, rng, -1.0, 1.0);
    const Tensor analytic = relu_backward(x, coeff);
    auto loss = [&]() {
        const Tensor y = relu(x);
        return std::inner_product(y.data.begin(), y.data.end(), coeff.data.begin(), 0.0);
    };
    CHECK(finite_difference_check(std::span<double>(x.data),
                                  std::span<const double>(analytic.data), loss, 1e-5,
                                  100) < 1e-6);
}

TEST_CASE("softmax cross entropy anchors") {
    Tensor even({2}, {0.0, 0.0});
    SoftmaxLoss l0 = softmax_cross_entropy(even, 0);
    CHECK(l0.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Tensor saturated({2}, {30.0, -30.0});
    SoftmaxLoss l1 = softmax_cross_entropy(saturated, 0);
    CHECK(l1.loss >= 0.0);
    CHECK(l1.loss < 1e-12);
}

TEST_CASE("softmax properties and loss gradient vs central differences") {
    Rng rng(37);
    for (int trial = 0; trial < 25; ++trial) {
        Tensor logits = random_tensor({2}, rng, -2.0, 2.0);
        const Tensor p = softmax(logits);
        CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-12);

        const std::size_t cls = rng.uniform_below(2);
        SoftmaxLoss sl = softmax_cross_entropy(logits, cls);
        CHECK(sl.loss >= 0.0);

        auto loss = [&]() { return softmax_cross_entropy(logits, cls).loss; };
        const double err = finite_difference_check(
            std::span<double>(logits.data), std::span<const double>(sl.grad.data), loss,
            1e-5, 10);
        CHECK(err < 1e-8);
    }
}

TEST_CASE("sgd update rule") {
    Tensor p({1}, {1.0});
    Tensor g({1}, {0.5});
    Tensor v({1}, {0.0});
    sgd_update(p, g, v, 0.1, 0.0);
    CHECK(p[0] == doctest::Approx(0.95).epsilon(1e-15));

    Tensor p2({3}, {1.0, 2.0, 3.0});
    Tensor g2({3});
    Tensor v2({3});
    sgd_update(p2, g2, v2, 0.1, 0.9);
    CHECK(p2.data == std::vector<double>{1.0, 2.0, 3.0});

    Tensor mismatched({2});
    CHECK_THROWS_AS(sgd_update(p2, mismatched, v2, 0.1, 0.9), ShapeError);
    CHECK_THROWS_AS(sgd_update(p2, g2, v2, -1.0, 0.9), ConfigError);
    CHECK_THROWS_AS(sgd_update(p2, g2, v2, 0.1, 1.0), ConfigError);
}

TEST_CASE("two momentum steps match the hand recurrence") {
    const double lr = 0.1, m = 0.9;
    const double g1 = 0.3, g2 = -0.2, p0 = 1.0;

    // hand evaluation of v_{t+1} = m v_t - lr g_t ; p_{t+1} = p_t + v_{t+1}
    const double v1 = -lr * g1;
    const double p1 = p0 + v1;
    const double v2 = m * v1 - lr * g2;
    const double p2 = p1 + v2;

    Tensor p({1}, {p0});
    Tensor v({1}, {0.0});
    Tensor grad1({1}, {g1});
    Tensor grad2({1}, {g2});
    sgd_update(p, grad1, v, lr, m);
    sgd_update(p, grad2, v, lr, m);
    CHECK(std::abs(p[0] - p2) <= 1e-15);
    CHECK(std::abs(v[0] - v2) <= 1e-15);
}

TEST_SUITE_END();
