#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "hvae/simd/kernels.hpp"

using hvae::simd::KernelTable;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& g, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return m;
}

}  // namespace

TEST_CASE("scalar sigmoid and tanh match libm") {
    const auto& k = hvae::simd::scalar_kernels();
    std::vector<double> in{-40.0, -3.0, -1e-8, 0.0, 0.5, 2.0, 35.0};
    std::vector<double> s(in.size()), t(in.size());
    k.sigmoid(in.data(), s.data(), in.size());
    k.tanh(in.data(), t.data(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(s[i] == doctest::Approx(1.0 / (1.0 + std::exp(-in[i]))).epsilon(1e-15));
        CHECK(t[i] == doctest::Approx(std::tanh(in[i])).epsilon(1e-15));
    }
}

TEST_CASE("dispatched table honours the scalar override") {
    const auto& k = hvae::simd::kernels();
    CHECK(!k.name.empty());
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const KernelTable* fast = hvae::simd::avx2_kernels();
    if (fast == nullptr) {
        MESSAGE("AVX2 variant unavailable on this host; skipping equivalence");
        return;
    }
    const KernelTable& ref = hvae::simd::scalar_kernels();
    std::mt19937_64 g(42);

    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 257u}) {
        CAPTURE(n);
        auto a = random_vec(n, g), b = random_vec(n, g);
        CHECK(fast->dot(a.data(), b.data(), n) == doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-12));

        auto y1 = random_vec(n, g);
        auto y2 = y1;
        ref.axpy(0.37, a.data(), y1.data(), n);
        fast->axpy(0.37, a.data(), y2.data(), n);
        CHECK(max_rel(y2, y1) < 1e-14);

        auto x = random_vec(n, g, 25.0);
        std::vector<double> s1(n), s2(n), t1(n), t2(n);
        ref.sigmoid(x.data(), s1.data(), n);
        fast->sigmoid(x.data(), s2.data(), n);
        ref.tanh(x.data(), t1.data(), n);
        fast->tanh(x.data(), t2.data(), n);
        CHECK(max_rel(s2, s1) < 1e-13);
        CHECK(max_rel(t2, t1) < 1e-13);
    }

    for (auto [rows, cols] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {3, 5}, {4, 4}, {9, 7}, {33, 19}, {64, 70}}) {
        CAPTURE(rows);
        CAPTURE(cols);
        auto w = random_vec(rows * cols, g), x = random_vec(cols, g), y = random_vec(rows, g);
        auto y1 = y, y2 = y;
        ref.gemv(w.data(), rows, cols, x.data(), y1.data());
        fast->gemv(w.data(), rows, cols, x.data(), y2.data());
        CHECK(max_rel(y2, y1) < 1e-12);

        auto x1 = x, x2 = x;
        ref.gemv_t(w.data(), rows, cols, y.data(), x1.data());
        fast->gemv_t(w.data(), rows, cols, y.data(), x2.data());
        CHECK(max_rel(x2, x1) < 1e-12);

        auto w1 = w, w2 = w;
        ref.ger(w1.data(), rows, cols, y.data(), x.data());
        fast->ger(w2.data(), rows, cols, y.data(), x.data());
        CHECK(max_rel(w2, w1) < 1e-14);

        for (std::size_t count : {1u, 2u, 5u, 13u}) {
            CAPTURE(count);
            auto ys = random_vec(count * rows, g), xs = random_vec(count * cols, g);
            auto outer = w;
            for (std::size_t k = 0; k < count; ++k)
                ref.ger(outer.data(), rows, cols, ys.data() + k * rows, xs.data() + k * cols);
            auto g1 = w, g2 = w;
            ref.gemm_tn(g1.data(), rows, cols, ys.data(), xs.data(), count);
            fast->gemm_tn(g2.data(), rows, cols, ys.data(), xs.data(), count);
            CHECK(max_rel(g1, outer) < 1e-12);
            CHECK(max_rel(g2, g1) < 1e-12);
        }
    }

    const std::size_t n = 37;
    auto theta = random_vec(n, g), grad = random_vec(n, g), m = random_vec(n, g, 0.1), v = random_vec(n, g, 0.1);
    for (auto& e : v) e = std::abs(e);
    auto th1 = theta, th2 = theta, m1 = m, m2 = m, v1 = v, v2 = v;
    ref.adam(th1.data(), grad.data(), m1.data(), v1.data(), n, 0.9, 0.999, 1e-3 / 0.1, 1e-3, 1e-8);
    fast->adam(th2.data(), grad.data(), m2.data(), v2.data(), n, 0.9, 0.999, 1e-3 / 0.1, 1e-3, 1e-8);
    CHECK(max_rel(th2, th1) < 1e-14);
    CHECK(max_rel(m2, m1) < 1e-15);
    CHECK(max_rel(v2, v1) < 1e-15);
}
