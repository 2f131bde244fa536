#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "hvae/nn/gaussian.hpp"
#include "hvae/nn/layers.hpp"
#include "hvae/nn/optim.hpp"
#include "hvae/nn/rng.hpp"

using namespace hvae::nn;

TEST_CASE("lstm with zero weights outputs zero") {
    ParameterSet ps;
    auto cell = LstmLayer::create(ps, "cell", 3, 4);
    std::vector<double> x{0.3, -1.0, 2.0};
    auto s = cell.step(ps.values(), x, {std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)});
    for (double h : s.h) CHECK(h == 0.0);
}

TEST_CASE("lstm step is deterministic and bounded") {
    ParameterSet ps;
    auto cell = LstmLayer::create(ps, "cell", 2, 5);
    Rng rng(3);
    for (auto& v : ps.values()) v = rng.uniform(-4.0, 4.0);
    LstmState zero{std::vector<double>(5, 0.0), std::vector<double>(5, 0.0)};
    std::vector<double> x0(2, 0.0);
    auto a = cell.step(ps.values(), x0, zero);
    auto b = cell.step(ps.values(), x0, zero);
    CHECK(a.h == b.h);
    CHECK(a.c == b.c);

    LstmState s = zero;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x{rng.uniform(-50, 50), rng.uniform(-50, 50)};
        s = cell.step(ps.values(), x, s);
        for (double h : s.h) {
            CHECK(std::isfinite(h));
            CHECK(std::abs(h) <= 1.0);
        }
    }
}

TEST_CASE("unrolled forward matches repeated steps") {
    ParameterSet ps;
    auto cell = LstmLayer::create(ps, "cell", 3, 4);
    Rng rng(5);
    cell.init(ps.values(), rng);
    std::vector<double> inputs = rng.normal_vector(6 * 3);
    LstmLayer::Sequence seq;
    cell.forward(ps.values(), inputs, {}, {}, seq);
    LstmState s{std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)};
    for (std::size_t t = 0; t < 6; ++t) {
        s = cell.step(ps.values(), std::span<const double>(inputs).subspan(t * 3, 3), s);
        auto h = seq.output(t, 4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(h[i] == doctest::Approx(s.h[i]).epsilon(1e-15));
    }
}

TEST_CASE("lstm backward passes the finite-difference check") {
    ParameterSet ps;
    auto l1 = LstmLayer::create(ps, "l1", 3, 5);
    auto l2 = LstmLayer::create(ps, "l2", 5, 4);
    auto head = DenseLayer::create(ps, "head", 4, 2, Activation::Tanh);
    Rng rng(11);
    l1.init(ps.values(), rng);
    l2.init(ps.values(), rng);
    head.init(ps.values(), rng);
    for (auto& v : ps.values()) v += rng.uniform(-0.3, 0.3);
    const std::size_t T = 6;
    const auto inputs = rng.normal_vector(T * 3);
    const auto h0 = rng.normal_vector(5);
    const auto c0 = rng.normal_vector(5);
    const auto target = rng.normal_vector(T * 2);

    auto loss = [&](std::span<const double> p, std::span<double> grad) {
        LstmLayer::Sequence s1, s2;
        l1.forward(p, inputs, h0, c0, s1);
        l2.forward(p, s1.outputs(5), {}, {}, s2);
        double total = 0.0;
        std::vector<double> y(T * 2);
        for (std::size_t t = 0; t < T; ++t) {
            head.forward(p, s2.output(t, 4), std::span<double>(y.data() + 2 * t, 2));
            for (std::size_t i = 0; i < 2; ++i) total += 0.5 * std::pow(y[2 * t + i] - target[2 * t + i], 2);
        }
        if (grad.empty()) return total;
        std::vector<double> dh2(T * 4, 0.0), dh1(T * 5, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> dy{y[2 * t] - target[2 * t], y[2 * t + 1] - target[2 * t + 1]};
            head.backward(p, grad, s2.output(t, 4), std::span<const double>(y.data() + 2 * t, 2), dy,
                          std::span<double>(dh2.data() + 4 * t, 4));
        }
        l2.backward(p, grad, s2, dh2, dh1, {}, {});
        std::vector<double> dh0(5), dc0(5);
        l1.backward(p, grad, s1, dh1, {}, dh0, dc0);
        return total;
    };
    auto result = grad_check(ps.values(), loss, {.coordinates = 1000});
    CHECK(result.checked == ps.size());
    CHECK(result.max_relative_error < 1e-4);
}

TEST_CASE("kl divergence closed form") {
    std::vector<double> z3(3, 0.0);
    CHECK(kl_divergence(z3, z3) == 0.0);
    CHECK(std::abs(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.0}) - 0.5) < 1e-12);
    // Fixture from an independent evaluation of -1/2 sum(1 + ln s2 - mu^2 - s2).
    std::vector<double> mu{0.5, -0.5, 0.0};
    std::vector<double> lv{std::log(0.25), 0.0, std::log(4.0)};
    CHECK(kl_divergence(mu, lv) == doctest::Approx(1.375).epsilon(1e-14));
}

TEST_CASE("kl divergence is nonnegative and zero only at the prior") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        auto mu = rng.normal_vector(4);
        std::vector<double> lv(4);
        for (auto& v : lv) v = rng.uniform(-12.0, 12.0);
        CHECK(kl_divergence(mu, lv) > 0.0);
    }
    CHECK_THROWS(kl_divergence(std::vector<double>{std::numeric_limits<double>::quiet_NaN()}, std::vector<double>{0.0}));
}

TEST_CASE("kl gradient matches finite differences") {
    std::vector<double> p{0.3, -1.2, 0.7, 0.4, -0.9, 1.5};
    auto loss = [](std::span<const double> q, std::span<double> grad) {
        auto mu = q.subspan(0, 3), lv = q.subspan(3, 3);
        if (!grad.empty()) kl_gradient(mu, lv, 1.0, grad.subspan(0, 3), grad.subspan(3, 3));
        return kl_divergence(mu, lv);
    };
    CHECK(grad_check(p, loss).max_relative_error < 1e-7);
}

TEST_CASE("reparameterization") {
    std::vector<double> mu{0.2, -3.0}, lv{0.5, -1.0}, zero(2, 0.0);
    CHECK(reparameterize(mu, lv, zero) == mu);

    std::vector<double> lv_inf{-std::numeric_limits<double>::infinity(), 1e6};
    auto z = reparameterize(mu, lv_inf, std::vector<double>{1.0, 1.0});
    CHECK(z[0] == doctest::Approx(0.2 + std::exp(-5.0)));
    CHECK(z[1] == doctest::Approx(-3.0 + std::exp(5.0)));

    Rng rng(2024);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    std::vector<double> m0{0.0}, l0{0.0};
    for (int i = 0; i < n; ++i) {
        const double v = reparameterize(m0, l0, rng)[0];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n, var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("rng streams repeat per seed") {
    Rng a(17), b(17), c(18);
    auto va = a.normal_vector(50), vb = b.normal_vector(50), vc = c.normal_vector(50);
    CHECK(va == vb);
    CHECK(va != vc);
}

TEST_CASE("adam first step and zero gradient") {
    AdamState adam(2);
    std::vector<double> p{1.0, -2.0};
    std::vector<double> g{0.3, -40.0};
    adam.step(p, g);
    CHECK(p[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
    CHECK(adam.steps() == 1);

    AdamState idle(3);
    std::vector<double> q{0.5, 0.25, -7.0}, before = q, zero(3, 0.0);
    for (int i = 0; i < 10; ++i) idle.step(q, zero);
    CHECK(q == before);
    CHECK_THROWS(idle.step(q, std::vector<double>(2, 0.0)));
}

TEST_CASE("adam converges on a quadratic bowl") {
    AdamState adam(1, {.learning_rate = 1e-2});
    std::vector<double> theta{1.0};
    for (int i = 0; i < 500; ++i) {
        std::vector<double> g{2.0 * theta[0]};
        adam.step(theta, g);
    }
    CHECK(std::abs(theta[0]) < 0.05);
}

TEST_CASE("global norm clipping") {
    std::vector<double> g{3.0, 4.0};
    CHECK(clip_global_norm(g, 5.0) == 5.0);
    CHECK(g == std::vector<double>{3.0, 4.0});
    CHECK(clip_global_norm(g, 1.0) == 5.0);
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));
}

TEST_CASE("grad_check on a linear model and its fault sensitivity") {
    Rng rng(4);
    const std::size_t in = 20, out = 15, batch = 8;
    ParameterSet ps;
    auto layer = DenseLayer::create(ps, "lin", in, out, Activation::Identity);
    layer.init(ps.values(), rng);
    const auto xs = rng.normal_vector(batch * in);
    const auto ts = rng.normal_vector(batch * out);
    auto make_loss = [&](bool corrupt) {
        return [&, corrupt](std::span<const double> p, std::span<double> grad) {
            double total = 0.0;
            std::vector<double> y(out), dy(out);
            for (std::size_t b = 0; b < batch; ++b) {
                auto x = std::span<const double>(xs).subspan(b * in, in);
                layer.forward(p, x, y);
                for (std::size_t i = 0; i < out; ++i) {
                    dy[i] = y[i] - ts[b * out + i];
                    total += 0.5 * dy[i] * dy[i];
                }
                if (!grad.empty()) layer.backward(p, grad, x, y, dy, {});
            }
            if (corrupt && !grad.empty()) grad[layer.weight + 7] *= 2.0;
            return total;
        };
    };
    auto clean = grad_check(ps.values(), make_loss(false));
    CHECK(clean.checked == 300 + 15);
    CHECK(clean.max_relative_error < 1e-7);

    auto faulty = grad_check(ps.values(), make_loss(true), {.coordinates = ps.size()});
    CHECK(faulty.max_relative_error > 0.5);
    CHECK(faulty.worst_index == layer.weight + 7);
}

TEST_CASE("grad_check samples a subset of large parameter sets") {
    std::vector<double> p(1000, 0.1);
    auto loss = [](std::span<const double> q, std::span<double> grad) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            s += std::sin(q[i]) * static_cast<double>(i % 7);
            if (!grad.empty()) grad[i] = std::cos(q[i]) * static_cast<double>(i % 7);
        }
        return s;
    };
    auto r = grad_check(p, loss);
    CHECK(r.checked == 400);
    CHECK(r.checked >= 200);
    CHECK(r.max_relative_error < 1e-6);
}
