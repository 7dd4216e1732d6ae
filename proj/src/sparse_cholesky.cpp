// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/sparse_cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace deramg
{

namespace
{

// Reverse Cuthill-McKee over the symmetric pattern of A, component by
// component, starting each component from a minimum-degree node.
std::vector<int> rcm_order(const SparseMatrix& A)
{
    const int n = A.rows();
    std::vector<int> degree(n);
    for (int i = 0; i < n; ++i)
        degree[i] = static_cast<int>(A.row_cols(i).size());

    std::vector<int> order;
    order.reserve(n);
    std::vector<unsigned char> seen(n, 0);

    std::vector<int> nodes(n);
    for (int i = 0; i < n; ++i)
        nodes[i] = i;
    std::stable_sort(nodes.begin(), nodes.end(),
                     [&](int a, int b) { return degree[a] < degree[b]; });

    std::vector<int> nbrs;
    for (const int start : nodes)
    {
        if (seen[start])
            continue;
        seen[start] = 1;
        std::queue<int> q;
        q.push(start);
        while (!q.empty())
        {
            const int u = q.front();
            q.pop();
            order.push_back(u);
            nbrs.clear();
            for (const int v : A.row_cols(u))
                if (v != u && !seen[v])
                {
                    seen[v] = 1;
                    nbrs.push_back(v);
                }
            std::stable_sort(nbrs.begin(), nbrs.end(),
                             [&](int a, int b) { return degree[a] < degree[b]; });
            for (const int v : nbrs)
                q.push(v);
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

} // namespace

SparseCholesky::SparseCholesky(const SparseMatrix& A, PivotPolicy policy)
    : n_(A.rows())
{
    DERAMG_REQUIRE(A.rows() == A.cols(), DimensionMismatch,
                   "Cholesky needs a square matrix");

    perm_ = rcm_order(A);
    inv_perm_.assign(n_, 0);
    for (int i = 0; i < n_; ++i)
        inv_perm_[perm_[i]] = i;

    // Fill during factorization stays within each row's profile, so the
    // envelope is fixed by the reordered pattern alone.
    first_.assign(n_, 0);
    for (int i = 0; i < n_; ++i)
    {
        int f = i;
        for (const int j : A.row_cols(perm_[i]))
            f = std::min(f, inv_perm_[j]);
        first_[i] = f;
    }

    row_ptr_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i)
        row_ptr_[i + 1] = row_ptr_[i] + static_cast<std::size_t>(i - first_[i] + 1);
    env_.assign(row_ptr_[n_], 0.0);

    double max_diag = 0.0;
    for (int i = 0; i < n_; ++i)
    {
        const int oi = perm_[i];
        auto cols = A.row_cols(oi);
        auto vals = A.row_values(oi);
        for (std::size_t k = 0; k < cols.size(); ++k)
        {
            const int jj = inv_perm_[cols[k]];
            if (jj <= i)
                env_[row_ptr_[i] + (jj - first_[i])] = vals[k];
            if (jj == i)
                max_diag = std::max(max_diag, std::abs(vals[k]));
        }
    }
    const double pivot_floor = 1e-14 * std::max(max_diag, 1e-300);

    for (int i = 0; i < n_; ++i)
    {
        double* ri = env_.data() + row_ptr_[i] - first_[i];
        for (int j = first_[i]; j < i; ++j)
        {
            const double* rj = env_.data() + row_ptr_[j] - first_[j];
            double s = ri[j];
            const int lo = std::max(first_[i], first_[j]);
            for (int k = lo; k < j; ++k)
                s -= ri[k] * rj[k];
            ri[j] = s / rj[j];
        }
        double d = ri[i];
        for (int k = first_[i]; k < i; ++k)
            d -= ri[k] * ri[k];
        if (d <= pivot_floor)
        {
            if (policy == PivotPolicy::Strict)
                throw NotPositiveDefinite(
                    "nonpositive pivot in sparse Cholesky at row " +
                    std::to_string(perm_[i]));
            // Semidefinite completion: decouple this row with a unit-scale
            // pivot so the factorization stays usable as a preconditioner
            // block.
            for (int k = first_[i]; k < i; ++k)
                ri[k] = 0.0;
            d = std::max(max_diag, 1.0);
        }
        ri[i] = std::sqrt(d);
    }
}

void SparseCholesky::solve(const double* b, double* x) const
{
    Vector y(n_);
    for (int i = 0; i < n_; ++i)
        y[i] = b[perm_[i]];
    for (int i = 0; i < n_; ++i)
    {
        const double* ri = env_.data() + row_ptr_[i] - first_[i];
        double s = y[i];
        for (int k = first_[i]; k < i; ++k)
            s -= ri[k] * y[k];
        y[i] = s / ri[i];
    }
    for (int i = n_ - 1; i >= 0; --i)
    {
        const double* ri = env_.data() + row_ptr_[i] - first_[i];
        y[i] /= ri[i];
        const double yi = y[i];
        for (int k = first_[i]; k < i; ++k)
            y[k] -= ri[k] * yi;
    }
    for (int i = 0; i < n_; ++i)
        x[perm_[i]] = y[i];
}

Vector SparseCholesky::solve(const Vector& b) const
{
    DERAMG_REQUIRE(static_cast<int>(b.size()) == n_, DimensionMismatch,
                   "Cholesky solve dimension mismatch");
    Vector x(n_);
    solve(b.data(), x.data());
    return x;
}

Vector sparse_direct_solve(const SparseMatrix& A, const Vector& b)
{
    return SparseCholesky(A).solve(b);
}

} // namespace deramg
