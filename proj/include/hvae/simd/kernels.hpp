#pragma once

// Dense double-precision kernels used by the recurrent models.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds
// with HVAE_ENABLE_AVX2, an AVX2/FMA variant. The variant is picked once at
// runtime from CPUID; setting HVAE_SIMD=scalar in the environment forces the
// reference path. All matrices are row-major.

#include <cstddef>
#include <string_view>

namespace hvae::simd {

struct KernelTable {
    std::string_view name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y += W x, W is rows x cols
    void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
    // x += W^T y, W is rows x cols
    void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* y, double* x);
    // W += y x^T, W is rows x cols
    void (*ger)(double* w, std::size_t rows, std::size_t cols, const double* y, const double* x);
    // W += sum_k y_k x_k^T over count row pairs; y is count x rows, x is
    // count x cols
    void (*gemm_tn)(double* w, std::size_t rows, std::size_t cols, const double* y, const double* x,
                    std::size_t count);
    // out[i] = 1 / (1 + exp(-in[i])); in and out may alias
    void (*sigmoid)(const double* in, double* out, std::size_t n);
    // out[i] = tanh(in[i]); in and out may alias
    void (*tanh)(const double* in, double* out, std::size_t n);
    // Adam moment update and parameter step. step_size already carries the
    // bias correction: theta -= step_size * m / (sqrt(v / bias2) + eps).
    void (*adam)(double* theta, const double* grad, double* m, double* v, std::size_t n, double beta1,
                 double beta2, double step_size, double bias2, double eps);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// The table every model uses; resolved on first call.
const KernelTable& kernels();

}  // namespace hvae::simd
