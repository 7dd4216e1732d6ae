// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "deramg/matrix_market.hpp"

using namespace deramg;

TEST_CASE("round trip preserves spmv bitwise")
{
    std::mt19937 gen(4);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 7; ++j)
            if ((i * 7 + j) % 3 == 0)
                t.emplace_back(i, j, val(gen));
    const auto A = SparseMatrix::from_triplets(9, 7, t);

    std::stringstream ss;
    write_matrix_market(A, ss);
    const auto B = read_matrix_market(ss);

    Vector x(7);
    for (double& v : x)
        v = val(gen);
    const auto ya = A.mult(x);
    const auto yb = B.mult(x);
    for (int i = 0; i < 9; ++i)
        CHECK(ya[i] == yb[i]);
}

TEST_CASE("header is the coordinate real general banner")
{
    std::stringstream ss;
    write_matrix_market(SparseMatrix::identity(2), ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "%%MatrixMarket matrix coordinate real general");
    std::getline(ss, line);
    CHECK(line == "2 2 2");
    std::getline(ss, line);
    CHECK(line == "1 1 1");
}

TEST_CASE("reader accepts comments and 1-based indices")
{
    std::stringstream ss;
    ss << "%%MatrixMarket matrix coordinate real general\n"
       << "% a comment\n"
       << "2 3 2\n"
       << "1 3 4.5\n"
       << "2 1 -1\n";
    const auto A = read_matrix_market(ss);
    CHECK(A.rows() == 2);
    CHECK(A.cols() == 3);
    CHECK(A.get(0, 2) == 4.5);
    CHECK(A.get(1, 0) == -1.0);
}

TEST_CASE("reader rejects malformed input")
{
    std::stringstream bad1("%%MatrixMarket matrix array real general\n1 1\n1\n");
    CHECK_THROWS_AS(read_matrix_market(bad1), ParseError);

    std::stringstream bad2(
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(bad2), ParseError);
}
