#include "hvae/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "hvae/simd/kernels.hpp"

namespace hvae::nn {

DenseLayer DenseLayer::create(ParameterSet& params, const std::string& name, std::size_t in, std::size_t out,
                              Activation activation) {
    DenseLayer layer;
    layer.in = in;
    layer.out = out;
    layer.activation = activation;
    layer.weight = params.add(name + ".weight", out, in);
    layer.bias = params.add(name + ".bias", out, 1);
    return layer;
}

void DenseLayer::init(std::span<double> params, Rng& rng) const {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::size_t i = 0; i < out * in; ++i) params[weight + i] = rng.uniform(-bound, bound);
    for (std::size_t i = 0; i < out; ++i) params[bias + i] = 0.0;
}

void DenseLayer::forward(std::span<const double> params, std::span<const double> x, std::span<double> y) const {
    if (x.size() != in || y.size() != out) throw std::invalid_argument("dense layer: dimension mismatch");
    const auto& k = simd::kernels();
    for (std::size_t i = 0; i < out; ++i) y[i] = params[bias + i];
    k.gemv(params.data() + weight, out, in, x.data(), y.data());
    if (activation == Activation::Tanh) k.tanh(y.data(), y.data(), out);
}

void DenseLayer::backward(std::span<const double> params, std::span<double> grads, std::span<const double> x,
                          std::span<const double> y, std::span<const double> dy, std::span<double> dx) const {
    const auto& k = simd::kernels();
    std::vector<double> dpre(dy.begin(), dy.end());
    if (activation == Activation::Tanh)
        for (std::size_t i = 0; i < out; ++i) dpre[i] *= 1.0 - y[i] * y[i];
    k.ger(grads.data() + weight, out, in, dpre.data(), x.data());
    k.axpy(1.0, dpre.data(), grads.data() + bias, out);
    if (!dx.empty()) k.gemv_t(params.data() + weight, out, in, dpre.data(), dx.data());
}

LstmLayer LstmLayer::create(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden) {
    LstmLayer layer;
    layer.in = in;
    layer.hidden = hidden;
    layer.weight = params.add(name + ".weight", 4 * hidden, in + hidden);
    layer.bias = params.add(name + ".bias", 4 * hidden, 1);
    return layer;
}

void LstmLayer::init(std::span<double> params, Rng& rng) const {
    const std::size_t cols = in + hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    for (std::size_t i = 0; i < 4 * hidden * cols; ++i) params[weight + i] = rng.uniform(-bound, bound);
    for (std::size_t i = 0; i < 4 * hidden; ++i) params[bias + i] = (i >= hidden && i < 2 * hidden) ? 1.0 : 0.0;
}

namespace {

// gates: pre-activations in, activations out.
void activate_gates(double* gates, std::size_t hidden) {
    const auto& k = simd::kernels();
    k.sigmoid(gates, gates, 2 * hidden);
    k.tanh(gates + 2 * hidden, gates + 2 * hidden, hidden);
    k.sigmoid(gates + 3 * hidden, gates + 3 * hidden, hidden);
}

}  // namespace

LstmState LstmLayer::step(std::span<const double> params, std::span<const double> x, const LstmState& state) const {
    if (x.size() != in || state.h.size() != hidden || state.c.size() != hidden)
        throw std::invalid_argument("lstm step: dimension mismatch");
    Sequence seq;
    forward(params, x, state.h, state.c, seq);
    LstmState next;
    auto h = seq.output(0, hidden);
    next.h.assign(h.begin(), h.end());
    next.c.assign(seq.c.begin() + static_cast<std::ptrdiff_t>(hidden), seq.c.end());
    return next;
}

void LstmLayer::forward(std::span<const double> params, std::span<const double> inputs, std::span<const double> h0,
                        std::span<const double> c0, Sequence& seq) const {
    if (inputs.size() % in != 0) throw std::invalid_argument("lstm: input length is not a multiple of input size");
    if ((!h0.empty() && h0.size() != hidden) || (!c0.empty() && c0.size() != hidden))
        throw std::invalid_argument("lstm: initial state dimension mismatch");
    const auto& k = simd::kernels();
    const std::size_t steps = inputs.size() / in;
    const std::size_t cols = in + hidden;
    const std::size_t H = hidden;
    seq.steps = steps;
    seq.xh.assign(steps * cols, 0.0);
    seq.gates.assign(steps * 4 * H, 0.0);
    seq.c.assign((steps + 1) * H, 0.0);
    seq.tanh_c.assign(steps * H, 0.0);
    seq.h.assign((steps + 1) * H, 0.0);
    if (!h0.empty()) std::copy(h0.begin(), h0.end(), seq.h.begin());
    if (!c0.empty()) std::copy(c0.begin(), c0.end(), seq.c.begin());

    const double* w = params.data() + weight;
    for (std::size_t t = 0; t < steps; ++t) {
        double* xh = seq.xh.data() + t * cols;
        std::copy_n(inputs.data() + t * in, in, xh);
        std::copy_n(seq.h.data() + t * H, H, xh + in);
        double* g = seq.gates.data() + t * 4 * H;
        std::copy_n(params.data() + bias, 4 * H, g);
        k.gemv(w, 4 * H, cols, xh, g);
        activate_gates(g, H);
        const double* c_prev = seq.c.data() + t * H;
        double* c = seq.c.data() + (t + 1) * H;
        for (std::size_t j = 0; j < H; ++j) c[j] = g[H + j] * c_prev[j] + g[j] * g[2 * H + j];
        double* tc = seq.tanh_c.data() + t * H;
        k.tanh(c, tc, H);
        double* h = seq.h.data() + (t + 1) * H;
        for (std::size_t j = 0; j < H; ++j) h[j] = g[3 * H + j] * tc[j];
    }
}

void LstmLayer::backward(std::span<const double> params, std::span<double> grads, const Sequence& seq,
                         std::span<const double> dh, std::span<double> d_inputs, std::span<double> dh0,
                         std::span<double> dc0) const {
    const auto& k = simd::kernels();
    const std::size_t H = hidden;
    const std::size_t cols = in + H;
    const std::size_t steps = seq.steps;
    if (dh.size() != steps * H) throw std::invalid_argument("lstm backward: dh has wrong length");
    if (!d_inputs.empty() && d_inputs.size() != steps * in)
        throw std::invalid_argument("lstm backward: d_inputs has wrong length");

    std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dpre_all(steps * 4 * H), dxh(cols);
    const double* w = params.data() + weight;
    // W^T once per sequence so the per-step input gradient is a blocked gemv.
    std::vector<double> wt(cols * 4 * H);
    for (std::size_t r = 0; r < 4 * H; ++r)
        for (std::size_t c = 0; c < cols; ++c) wt[c * 4 * H + r] = w[r * cols + c];

    for (std::size_t t = steps; t-- > 0;) {
        const double* g = seq.gates.data() + t * 4 * H;
        const double* tc = seq.tanh_c.data() + t * H;
        const double* c_prev = seq.c.data() + t * H;
        double* dpre = dpre_all.data() + t * 4 * H;
        for (std::size_t j = 0; j < H; ++j) {
            const double i_g = g[j], f_g = g[H + j], c_g = g[2 * H + j], o_g = g[3 * H + j];
            const double dhj = dh[t * H + j] + dh_next[j];
            const double dc = dhj * o_g * (1.0 - tc[j] * tc[j]) + dc_next[j];
            dpre[j] = dc * c_g * i_g * (1.0 - i_g);
            dpre[H + j] = dc * c_prev[j] * f_g * (1.0 - f_g);
            dpre[2 * H + j] = dc * i_g * (1.0 - c_g * c_g);
            dpre[3 * H + j] = dhj * tc[j] * o_g * (1.0 - o_g);
            dc_next[j] = dc * f_g;
        }
        std::fill(dxh.begin(), dxh.end(), 0.0);
        k.gemv(wt.data(), cols, 4 * H, dpre, dxh.data());
        if (!d_inputs.empty()) k.axpy(1.0, dxh.data(), d_inputs.data() + t * in, in);
        std::copy_n(dxh.data() + in, H, dh_next.data());
    }
    k.gemm_tn(grads.data() + weight, 4 * H, cols, dpre_all.data(), seq.xh.data(), steps);
    double* gb = grads.data() + bias;
    for (std::size_t t = 0; t < steps; ++t) k.axpy(1.0, dpre_all.data() + t * 4 * H, gb, 4 * H);
    if (!dh0.empty()) std::copy(dh_next.begin(), dh_next.end(), dh0.begin());
    if (!dc0.empty()) std::copy(dc_next.begin(), dc_next.end(), dc0.begin());
}

}  // namespace hvae::nn
