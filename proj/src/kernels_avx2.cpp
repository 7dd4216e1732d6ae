// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/kernels.hpp"

#include <immintrin.h>

namespace deramg::kernels::detail
{

namespace
{

// AVX2 lane. Elementwise ops perform the same per-entry operations as the
// scalar lane (mul then add, no FMA contraction) and therefore match it
// bitwise. Reductions use four independent accumulators combined in a fixed
// order, so they are deterministic but round differently than the scalar
// ascending sum; the equivalence tests bound the difference.

inline double hsum4(__m256d acc)
{
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    return ((t[0] + t[1]) + t[2]) + t[3];
}

double dot_avx2(const double* x, const double* y, std::size_t n)
{
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4)
    {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(xv, yv));
    }
    double s = hsum4(acc);
    for (; i < n; ++i)
        s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n)
{
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
    {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n)
{
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        x[i] *= a;
}

double gather_dot_avx2(const int* cols, const double* vals, std::size_t nnz,
                       const double* x)
{
    std::size_t k = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= nnz; k += 4)
    {
        const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
        const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
        const __m256d vv = _mm256_loadu_pd(vals + k);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vv, xv));
    }
    double s = hsum4(acc);
    for (; k < nnz; ++k)
        s += vals[k] * x[cols[k]];
    return s;
}

} // namespace

const Ops avx2_ops = {dot_avx2, axpy_avx2, scale_avx2, gather_dot_avx2, "avx2"};

} // namespace deramg::kernels::detail
