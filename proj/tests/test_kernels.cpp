// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deramg/kernels.hpp"

using namespace deramg;

namespace
{

std::vector<double> random_vector(std::size_t n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v)
        x = dist(gen);
    return v;
}

} // namespace

TEST_CASE("scalar lane is always available")
{
    CHECK(kernels::lane_available(kernels::Lane::Scalar));
    const auto& ops = kernels::ops_for(kernels::Lane::Scalar);
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {4.0, 5.0, 6.0};
    CHECK(ops.dot(x.data(), y.data(), 3) == doctest::Approx(32.0));
}

TEST_CASE("lanes agree on elementwise ops bitwise")
{
    if (!kernels::lane_available(kernels::Lane::Avx2))
        return;
    const auto& scalar = kernels::ops_for(kernels::Lane::Scalar);
    const auto& wide = kernels::ops_for(kernels::Lane::Avx2);

    for (const std::size_t n : {std::size_t(1), std::size_t(7), std::size_t(64),
                                std::size_t(1001)})
    {
        const auto x = random_vector(n, 11 + unsigned(n));
        auto y1 = random_vector(n, 17 + unsigned(n));
        auto y2 = y1;
        scalar.axpy(0.37, x.data(), y1.data(), n);
        wide.axpy(0.37, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(y1[i] == y2[i]);

        auto s1 = x;
        auto s2 = x;
        scalar.scale(-1.75, s1.data(), n);
        wide.scale(-1.75, s2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(s1[i] == s2[i]);
    }
}

TEST_CASE("lanes agree on reductions to rounding accuracy")
{
    if (!kernels::lane_available(kernels::Lane::Avx2))
        return;
    const auto& scalar = kernels::ops_for(kernels::Lane::Scalar);
    const auto& wide = kernels::ops_for(kernels::Lane::Avx2);

    for (const std::size_t n : {std::size_t(3), std::size_t(100), std::size_t(4097)})
    {
        const auto x = random_vector(n, 5 + unsigned(n));
        const auto y = random_vector(n, 7 + unsigned(n));
        const double ds = scalar.dot(x.data(), y.data(), n);
        const double dw = wide.dot(x.data(), y.data(), n);
        CHECK(std::abs(ds - dw) <= 1e-13 * (1.0 + std::abs(ds)) * double(n));

        std::vector<int> cols(n);
        for (std::size_t i = 0; i < n; ++i)
            cols[i] = static_cast<int>((i * 7) % n);
        const double gs = scalar.gather_dot(cols.data(), x.data(), n, y.data());
        const double gw = wide.gather_dot(cols.data(), x.data(), n, y.data());
        CHECK(std::abs(gs - gw) <= 1e-13 * (1.0 + std::abs(gs)) * double(n));
    }
}

TEST_CASE("gather_dot matches an explicit sum")
{
    const std::vector<double> x = {2.0, -3.0, 0.5};
    const std::vector<double> vals = {1.0, 4.0};
    const std::vector<int> cols = {2, 0};
    CHECK(kernels::gather_dot(cols.data(), vals.data(), 2, x.data()) ==
          doctest::Approx(0.5 + 8.0));
}
