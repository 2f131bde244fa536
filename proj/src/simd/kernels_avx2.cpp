// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after the runtime CPU check in
// dispatch.cpp; keep it free of inline standard-library code so no AVX
// instantiation can leak into the rest of the binary.

#include <immintrin.h>

#include <cstddef>

#include "hvae/simd/kernels.hpp"

namespace hvae::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

// exp(x) for x clamped to [-708, 708]: range reduction by ln 2 and a
// degree-12 Taylor polynomial on |r| <= ln(2)/2 (truncation < 3e-16).
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(0.693145751953125);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
    x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-708.0)), _mm256_set1_pd(708.0));
    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.0 / 479001600.0);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    __m256i k = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
    k = _mm256_slli_epi64(_mm256_add_epi64(k, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(k));
}

inline __m256d sigmoid_pd(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), x));
    return _mm256_div_pd(one, _mm256_add_pd(one, e));
}

inline __m256d tanh_pd(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d sign = _mm256_and_pd(x, sign_mask);
    __m256d ax = _mm256_andnot_pd(sign_mask, x);
    __m256d e = exp_pd(_mm256_min_pd(_mm256_add_pd(ax, ax), _mm256_set1_pd(40.0)));
    __m256d t = _mm256_sub_pd(one, _mm256_div_pd(_mm256_set1_pd(2.0), _mm256_add_pd(e, one)));
    return _mm256_or_pd(t, sign);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
    std::size_t r = 0;
    // Four rows per pass so each x load feeds four FMAs.
    for (; r + 4 <= rows; r += 4) {
        const double* w0 = w + r * cols;
        const double* w1 = w0 + cols;
        const double* w2 = w1 + cols;
        const double* w3 = w2 + cols;
        __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d xv = _mm256_loadu_pd(x + c);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), xv, a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), xv, a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), xv, a3);
        }
        double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
        for (; c < cols; ++c) {
            s0 += w0[c] * x[c];
            s1 += w1[c] * x[c];
            s2 += w2[c] * x[c];
            s3 += w3[c] * x[c];
        }
        y[r] += s0;
        y[r + 1] += s1;
        y[r + 2] += s2;
        y[r + 3] += s3;
    }
    for (; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

void gemv_t_avx2(const double* w, std::size_t rows, std::size_t cols, const double* y, double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(y[r], w + r * cols, x, cols);
}

void ger_avx2(double* w, std::size_t rows, std::size_t cols, const double* y, const double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(y[r], x, w + r * cols, cols);
}

void gemm_tn_avx2(double* w, std::size_t rows, std::size_t cols, const double* y, const double* x,
                  std::size_t count) {
    // 4 x 8 register tile of W accumulated over all k before touching memory.
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        std::size_t c = 0;
        for (; c + 8 <= cols; c += 8) {
            __m256d a00 = _mm256_setzero_pd(), a01 = _mm256_setzero_pd();
            __m256d a10 = _mm256_setzero_pd(), a11 = _mm256_setzero_pd();
            __m256d a20 = _mm256_setzero_pd(), a21 = _mm256_setzero_pd();
            __m256d a30 = _mm256_setzero_pd(), a31 = _mm256_setzero_pd();
            for (std::size_t k = 0; k < count; ++k) {
                const double* xk = x + k * cols + c;
                const double* yk = y + k * rows + r;
                const __m256d x0 = _mm256_loadu_pd(xk), x1 = _mm256_loadu_pd(xk + 4);
                __m256d b = _mm256_broadcast_sd(yk);
                a00 = _mm256_fmadd_pd(b, x0, a00);
                a01 = _mm256_fmadd_pd(b, x1, a01);
                b = _mm256_broadcast_sd(yk + 1);
                a10 = _mm256_fmadd_pd(b, x0, a10);
                a11 = _mm256_fmadd_pd(b, x1, a11);
                b = _mm256_broadcast_sd(yk + 2);
                a20 = _mm256_fmadd_pd(b, x0, a20);
                a21 = _mm256_fmadd_pd(b, x1, a21);
                b = _mm256_broadcast_sd(yk + 3);
                a30 = _mm256_fmadd_pd(b, x0, a30);
                a31 = _mm256_fmadd_pd(b, x1, a31);
            }
            double* w0 = w + r * cols + c;
            const __m256d acc[4][2] = {{a00, a01}, {a10, a11}, {a20, a21}, {a30, a31}};
            for (std::size_t i = 0; i < 4; ++i) {
                double* wi = w0 + i * cols;
                _mm256_storeu_pd(wi, _mm256_add_pd(_mm256_loadu_pd(wi), acc[i][0]));
                _mm256_storeu_pd(wi + 4, _mm256_add_pd(_mm256_loadu_pd(wi + 4), acc[i][1]));
            }
        }
        for (; c < cols; ++c)
            for (std::size_t i = 0; i < 4; ++i) {
                double s = 0.0;
                for (std::size_t k = 0; k < count; ++k) s += y[k * rows + r + i] * x[k * cols + c];
                w[(r + i) * cols + c] += s;
            }
    }
    for (; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < count; ++k) s += y[k * rows + r] * x[k * cols + c];
            w[r * cols + c] += s;
        }
}

void sigmoid_avx2(const double* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, sigmoid_pd(_mm256_loadu_pd(in + i)));
    if (i < n) {
        double buf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = 0; i + k < n; ++k) buf[k] = in[i + k];
        _mm256_storeu_pd(buf, sigmoid_pd(_mm256_loadu_pd(buf)));
        for (std::size_t k = 0; i + k < n; ++k) out[i + k] = buf[k];
    }
}

void tanh_avx2(const double* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, tanh_pd(_mm256_loadu_pd(in + i)));
    if (i < n) {
        double buf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = 0; i + k < n; ++k) buf[k] = in[i + k];
        _mm256_storeu_pd(buf, tanh_pd(_mm256_loadu_pd(buf)));
        for (std::size_t k = 0; i + k < n; ++k) out[i + k] = buf[k];
    }
}

void adam_avx2(double* theta, const double* grad, double* m, double* v, std::size_t n, double beta1,
               double beta2, double step_size, double bias2, double eps) {
    const __m256d b1 = _mm256_set1_pd(beta1), c1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d b2 = _mm256_set1_pd(beta2), c2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d step = _mm256_set1_pd(step_size), inv_bias2 = _mm256_set1_pd(1.0 / bias2);
    const __m256d ep = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d g = _mm256_loadu_pd(grad + i);
        __m256d mi = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(c1, g));
        __m256d vi = _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i), _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, inv_bias2)), ep);
        __m256d th = _mm256_loadu_pd(theta + i);
        _mm256_storeu_pd(theta + i, _mm256_sub_pd(th, _mm256_div_pd(_mm256_mul_pd(step, mi), denom)));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        double d = v[i] * (1.0 / bias2);
        __m128d s = _mm_sqrt_sd(_mm_setzero_pd(), _mm_set_sd(d));
        theta[i] -= step_size * m[i] / (_mm_cvtsd_f64(s) + eps);
    }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{
        "avx2",   dot_avx2,     axpy_avx2, gemv_avx2, gemv_t_avx2,
        ger_avx2, gemm_tn_avx2, sigmoid_avx2, tanh_avx2, adam_avx2,
    };
    return table;
}

}  // namespace hvae::simd
