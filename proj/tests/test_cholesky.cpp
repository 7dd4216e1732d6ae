// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deramg/sparse_cholesky.hpp"

using namespace deramg;

TEST_CASE("diagonal solve")
{
    const auto A = SparseMatrix::diagonal({1, 2, 3});
    const auto x = sparse_direct_solve(A, {1, 2, 3});
    CHECK(x[0] == doctest::Approx(1));
    CHECK(x[1] == doctest::Approx(1));
    CHECK(x[2] == doctest::Approx(1));
}

TEST_CASE("1d laplacian hand elimination")
{
    // tridiag(-1, 2, -1), n = 3, b = (0,1,0) -> (0.5, 1.0, 0.5)
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < 3; ++i)
    {
        t.emplace_back(i, i, 2.0);
        if (i > 0)
        {
            t.emplace_back(i, i - 1, -1.0);
            t.emplace_back(i - 1, i, -1.0);
        }
    }
    const auto A = SparseMatrix::from_triplets(3, 3, t);
    const auto x = sparse_direct_solve(A, {0, 1, 0});
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(1.0));
    CHECK(x[2] == doctest::Approx(0.5));
}

TEST_CASE("random SPD residual")
{
    const int n = 20;
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<std::vector<double>> B(n, std::vector<double>(n));
    for (auto& row : B)
        for (double& v : row)
            v = val(gen);
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
        {
            double s = i == j ? 2.0 * n : 0.0;
            for (int k = 0; k < n; ++k)
                s += B[k][i] * B[k][j];
            t.emplace_back(i, j, s);
        }
    const auto A = SparseMatrix::from_triplets(n, n, t);
    Vector b(n);
    for (int i = 0; i < n; ++i)
        b[i] = std::cos(0.3 * i);
    const auto x = sparse_direct_solve(A, b);
    const auto r = A.mult(x);
    double rn = 0, bn = 0;
    for (int i = 0; i < n; ++i)
    {
        rn += (r[i] - b[i]) * (r[i] - b[i]);
        bn += b[i] * b[i];
    }
    CHECK(std::sqrt(rn) <= 1e-12 * std::sqrt(bn) * 100);
}

TEST_CASE("indefinite matrix is rejected")
{
    const auto A = SparseMatrix::diagonal({1.0, -1.0});
    CHECK_THROWS_AS(sparse_direct_solve(A, {1, 1}), NotPositiveDefinite);
}

TEST_CASE("completed pivot policy survives a semidefinite system")
{
    // rank-1 PSD matrix [[1,1],[1,1]]
    const auto A = SparseMatrix::from_triplets(
        2, 2,
        std::vector<std::tuple<int, int, double>>{
            {0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
    SparseCholesky chol(A, SparseCholesky::PivotPolicy::Completed);
    // the completed factorization is a symmetric positive definite operator
    const Vector r1 = {1.0, -2.0};
    const Vector r2 = {0.3, 0.9};
    CHECK(dot(r1, chol.solve(r2)) ==
          doctest::Approx(dot(r2, chol.solve(r1))).epsilon(1e-13));
    CHECK(dot(r1, chol.solve(r1)) > 0.0);
    CHECK(dot(r2, chol.solve(r2)) > 0.0);
    // and strict mode rejects the same matrix
    CHECK_THROWS_AS(SparseCholesky(A, SparseCholesky::PivotPolicy::Strict),
                    NotPositiveDefinite);
}

TEST_CASE("bigger banded SPD system with RCM reordering")
{
    // 2D 5-point laplacian on a 12x12 grid
    const int g = 12, n = g * g;
    std::vector<std::tuple<int, int, double>> t;
    auto id = [g](int i, int j) { return i * g + j; };
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
        {
            t.emplace_back(id(i, j), id(i, j), 4.0);
            if (i > 0)
                t.emplace_back(id(i, j), id(i - 1, j), -1.0);
            if (i + 1 < g)
                t.emplace_back(id(i, j), id(i + 1, j), -1.0);
            if (j > 0)
                t.emplace_back(id(i, j), id(i, j - 1), -1.0);
            if (j + 1 < g)
                t.emplace_back(id(i, j), id(i, j + 1), -1.0);
        }
    const auto A = SparseMatrix::from_triplets(n, n, t);
    Vector b(n, 1.0);
    const auto x = sparse_direct_solve(A, b);
    const auto r = A.mult(x);
    double rn = 0;
    for (int i = 0; i < n; ++i)
        rn += (r[i] - 1.0) * (r[i] - 1.0);
    CHECK(std::sqrt(rn) <= 1e-10);
}
