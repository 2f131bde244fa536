#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hvae/nn/parameters.hpp"
#include "hvae/nn/rng.hpp"

namespace hvae::nn {

enum class Activation { Identity, Tanh };

/// y = act(W x + b). Holds offsets into a ParameterSet, not the weights.
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::Identity;
    std::size_t weight = 0;  // out x in
    std::size_t bias = 0;    // out

    static DenseLayer create(ParameterSet& params, const std::string& name, std::size_t in, std::size_t out,
                             Activation activation);

    /// Weights uniform in +-1/sqrt(in), bias zero.
    void init(std::span<double> params, Rng& rng) const;

    void forward(std::span<const double> params, std::span<const double> x, std::span<double> y) const;

    /// Accumulates parameter gradients into grads and, when dx is non-empty,
    /// input gradients into dx. y is the forward output.
    void backward(std::span<const double> params, std::span<double> grads, std::span<const double> x,
                  std::span<const double> y, std::span<const double> dy, std::span<double> dx) const;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;
};

/// Standard LSTM layer. One stacked weight matrix of shape 4H x (in + H)
/// acting on [x; h_prev], gate blocks in the order input, forget,
/// candidate, output.
struct LstmLayer {
    std::size_t in = 0;
    std::size_t hidden = 0;
    std::size_t weight = 0;  // 4H x (in + H)
    std::size_t bias = 0;    // 4H

    static LstmLayer create(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden);

    /// Weights uniform in +-1/sqrt(in + H); biases zero except the forget
    /// gate, which starts at +1.
    void init(std::span<double> params, Rng& rng) const;

    /// Forward cache for a whole unrolled sequence.
    struct Sequence {
        std::size_t steps = 0;
        std::vector<double> xh;      // steps x (in + H)
        std::vector<double> gates;   // steps x 4H, post-activation
        std::vector<double> c;       // (steps + 1) x H, row 0 is c0
        std::vector<double> tanh_c;  // steps x H
        std::vector<double> h;       // (steps + 1) x H, row 0 is h0

        std::span<const double> output(std::size_t t, std::size_t hidden) const {
            return std::span<const double>(h).subspan((t + 1) * hidden, hidden);
        }
        /// All outputs h_1..h_T, steps x H.
        std::span<const double> outputs(std::size_t hidden) const {
            return std::span<const double>(h).subspan(hidden, steps * hidden);
        }
    };

    /// One recurrence step.
    LstmState step(std::span<const double> params, std::span<const double> x, const LstmState& state) const;

    /// Unrolls over inputs (steps x in). Empty h0/c0 mean zero state.
    void forward(std::span<const double> params, std::span<const double> inputs, std::span<const double> h0,
                 std::span<const double> c0, Sequence& seq) const;

    /// Backpropagation through time. dh holds dLoss/dh_t for every output
    /// (steps x H). Input gradients are accumulated into d_inputs and initial
    /// state gradients written to dh0/dc0; any of the three may be empty.
    void backward(std::span<const double> params, std::span<double> grads, const Sequence& seq,
                  std::span<const double> dh, std::span<double> d_inputs, std::span<double> dh0,
                  std::span<double> dc0) const;
};

}  // namespace hvae::nn
