// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_KERNELS_HPP
#define DERAMG_KERNELS_HPP

#include <cstddef>

namespace deramg::kernels
{

/// Instruction-set lane for the arithmetic inner loops. Scalar is the
/// reference implementation; wide lanes must match it to the tolerances
/// asserted in the kernel equivalence tests (bitwise for elementwise ops,
/// small relative error for reductions, whose summation order differs).
enum class Lane
{
    Scalar,
    Avx2
};

struct Ops
{
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    void (*scale)(double a, double* x, std::size_t n);
    // sum_k vals[k] * x[cols[k]]  (one CSR row)
    double (*gather_dot)(const int* cols, const double* vals, std::size_t nnz,
                         const double* x);
    const char* name;
};

/// The lane selected at startup: the widest available one, unless the
/// environment variable DERAMG_KERNELS=scalar|avx2 overrides it.
const Ops& active();
Lane active_lane();

bool lane_available(Lane lane);
const Ops& ops_for(Lane lane);

/// Force a lane for the rest of the process (tests use this to compare
/// lanes). Throws deramg::Error if the lane is not available on this CPU.
void force_lane(Lane lane);

inline double dot(const double* x, const double* y, std::size_t n)
{
    return active().dot(x, y, n);
}

inline void axpy(double a, const double* x, double* y, std::size_t n)
{
    active().axpy(a, x, y, n);
}

inline void scale(double a, double* x, std::size_t n)
{
    active().scale(a, x, n);
}

inline double gather_dot(const int* cols, const double* vals, std::size_t nnz,
                         const double* x)
{
    return active().gather_dot(cols, vals, nnz, x);
}

namespace detail
{
extern const Ops scalar_ops;
#ifdef DERAMG_KERNELS_AVX2
extern const Ops avx2_ops;
#endif
bool cpu_has_avx2();
}

} // namespace deramg::kernels

#endif
