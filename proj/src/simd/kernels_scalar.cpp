#include "hvae/simd/kernels.hpp"

#include <cmath>

namespace hvae::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void gemv_t_scalar(const double* w, std::size_t rows, std::size_t cols, const double* y, double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(y[r], w + r * cols, x, cols);
}

void ger_scalar(double* w, std::size_t rows, std::size_t cols, const double* y, const double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(y[r], x, w + r * cols, cols);
}

void gemm_tn_scalar(double* w, std::size_t rows, std::size_t cols, const double* y, const double* x,
                    std::size_t count) {
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < count; ++k) s += y[k * rows + r] * x[k * cols + c];
            w[r * cols + c] += s;
        }
}

void sigmoid_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-in[i]));
}

void tanh_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(in[i]);
}

void adam_scalar(double* theta, const double* grad, double* m, double* v, std::size_t n, double beta1,
                 double beta2, double step_size, double bias2, double eps) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        theta[i] -= step_size * m[i] / (std::sqrt(v[i] / bias2) + eps);
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar",       dot_scalar,     axpy_scalar, gemv_scalar, gemv_t_scalar,
        ger_scalar,     gemm_tn_scalar, sigmoid_scalar, tanh_scalar, adam_scalar,
    };
    return table;
}

}  // namespace hvae::simd
