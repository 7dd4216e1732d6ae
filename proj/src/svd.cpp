// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deramg
{

namespace
{

// One-sided Jacobi: rotate column pairs of B until all pairs are
// numerically orthogonal, accumulating the rotations in V.
void jacobi_sweeps(DenseMatrix& B, DenseMatrix& V)
{
    const int m = B.rows();
    const int n = B.cols();
    const double eps = 1e-15;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep)
    {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q)
            {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int i = 0; i < m; ++i)
                {
                    app += B(i, p) * B(i, p);
                    aqq += B(i, q) * B(i, q);
                    apq += B(i, p) * B(i, q);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < m; ++i)
                {
                    const double bp = B(i, p);
                    const double bq = B(i, q);
                    B(i, p) = c * bp - s * bq;
                    B(i, q) = s * bp + c * bq;
                }
                for (int i = 0; i < n; ++i)
                {
                    const double vp = V(i, p);
                    const double vq = V(i, q);
                    V(i, p) = c * vp - s * vq;
                    V(i, q) = s * vp + c * vq;
                }
            }
        if (!rotated)
            break;
    }
}

} // namespace

SvdResult svd(const DenseMatrix& A)
{
    const int m = A.rows();
    const int n = A.cols();
    DenseMatrix B = A;
    DenseMatrix V = DenseMatrix::identity(n);
    jacobi_sweeps(B, V);

    Vector sigma(n);
    for (int j = 0; j < n; ++j)
    {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            s += B(i, j) * B(i, j);
        sigma[j] = std::sqrt(s);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });

    SvdResult r;
    r.u = DenseMatrix(m, n);
    r.v = DenseMatrix(n, n);
    r.sigma.resize(n);
    for (int jj = 0; jj < n; ++jj)
    {
        const int j = order[jj];
        r.sigma[jj] = sigma[j];
        const double inv = sigma[j] > 0.0 ? 1.0 / sigma[j] : 0.0;
        for (int i = 0; i < m; ++i)
            r.u(i, jj) = B(i, j) * inv;
        for (int i = 0; i < n; ++i)
            r.v(i, jj) = V(i, j);
    }
    return r;
}

Vector singular_values(const DenseMatrix& A)
{
    return svd(A).sigma;
}

int rank(const DenseMatrix& A, double rel_tol)
{
    if (A.rows() == 0 || A.cols() == 0)
        return 0;
    const Vector s = singular_values(A);
    if (s.empty() || s[0] == 0.0)
        return 0;
    int r = 0;
    for (const double v : s)
        if (v > rel_tol * s[0])
            ++r;
    return r;
}

DenseMatrix nullspace(const DenseMatrix& A, double rel_tol)
{
    const SvdResult r = svd(A);
    const double smax = r.sigma.empty() ? 0.0 : r.sigma[0];
    int first = 0;
    while (first < static_cast<int>(r.sigma.size()) &&
           r.sigma[first] > rel_tol * smax && smax > 0.0)
        ++first;
    const int dim = A.cols() - first;
    DenseMatrix N(A.cols(), dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < A.cols(); ++i)
            N(i, j) = r.v(i, first + j);
    return N;
}

DenseMatrix svd_orthonormal_complement(const DenseMatrix& V, const DenseMatrix& W,
                                       double tol)
{
    const int m = V.rows();
    DenseMatrix R = V;

    if (W.cols() > 0)
    {
        // Orthonormal basis of the deflation space, then project it out.
        const SvdResult ws = svd(W);
        const double wmax = ws.sigma.empty() ? 0.0 : ws.sigma[0];
        int wr = 0;
        while (wr < static_cast<int>(ws.sigma.size()) && wmax > 0.0 &&
               ws.sigma[wr] > 1e-13 * wmax)
            ++wr;
        for (int c = 0; c < wr; ++c)
            for (int j = 0; j < V.cols(); ++j)
            {
                double proj = 0.0;
                for (int i = 0; i < m; ++i)
                    proj += ws.u(i, c) * R(i, j);
                for (int i = 0; i < m; ++i)
                    R(i, j) -= proj * ws.u(i, c);
            }
    }

    if (R.cols() == 0)
        return DenseMatrix(m, 0);

    const SvdResult rs = svd(R);
    const double smax = rs.sigma.empty() ? 0.0 : rs.sigma[0];
    // The cutoff is relative to the dominant surviving direction; a scale
    // guard keeps numerically dead residuals (V entirely inside span(W))
    // from resurrecting as noise.
    double scale = 0.0;
    for (int j = 0; j < V.cols(); ++j)
    {
        double c = 0.0;
        for (int i = 0; i < m; ++i)
            c += V(i, j) * V(i, j);
        scale = std::max(scale, std::sqrt(c));
    }
    if (smax <= 1e-13 * scale || smax == 0.0)
        return DenseMatrix(m, 0);

    int keep = 0;
    while (keep < static_cast<int>(rs.sigma.size()) && rs.sigma[keep] > tol * smax)
        ++keep;
    DenseMatrix Q(m, keep);
    for (int j = 0; j < keep; ++j)
        for (int i = 0; i < m; ++i)
            Q(i, j) = rs.u(i, j);
    return Q;
}

} // namespace deramg
