// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/kernels.hpp"

namespace deramg::kernels::detail
{

namespace
{

// Reference lane. Reductions accumulate in index-ascending order; results
// of a single-threaded run are bitwise reproducible.

double dot_scalar(const double* x, const double* y, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        x[i] *= a;
}

double gather_dot_scalar(const int* cols, const double* vals, std::size_t nnz,
                         const double* x)
{
    double s = 0.0;
    for (std::size_t k = 0; k < nnz; ++k)
        s += vals[k] * x[cols[k]];
    return s;
}

} // namespace

const Ops scalar_ops = {dot_scalar, axpy_scalar, scale_scalar,
                        gather_dot_scalar, "scalar"};

} // namespace deramg::kernels::detail
