// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/matrix_market.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace deramg
{

void write_matrix_market(const SparseMatrix& A, std::ostream& os)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
    os.precision(17);
    for (int i = 0; i < A.rows(); ++i)
    {
        auto cols = A.row_cols(i);
        auto vals = A.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            os << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
    }
}

void write_matrix_market(const SparseMatrix& A, const std::string& path)
{
    std::ofstream os(path);
    DERAMG_REQUIRE(os.good(), Error, "cannot open " + path + " for writing");
    write_matrix_market(A, os);
    DERAMG_REQUIRE(os.good(), Error, "write to " + path + " failed");
}

SparseMatrix read_matrix_market(std::istream& is)
{
    std::string line;
    int lineno = 0;

    DERAMG_REQUIRE(std::getline(is, line), Error, "empty MatrixMarket stream");
    ++lineno;
    {
        std::istringstream hdr(line);
        std::string banner, object, format, field, symmetry;
        hdr >> banner >> object >> format >> field >> symmetry;
        if (banner != "%%MatrixMarket" || object != "matrix" ||
            format != "coordinate" || field != "real" || symmetry != "general")
            throw ParseError("unsupported MatrixMarket header", lineno);
    }

    while (std::getline(is, line))
    {
        ++lineno;
        if (!line.empty() && line[0] != '%')
            break;
    }
    std::istringstream dims(line);
    int m = -1, n = -1;
    long long nnz = -1;
    dims >> m >> n >> nnz;
    if (m < 0 || n < 0 || nnz < 0)
        throw ParseError("bad MatrixMarket size line", lineno);

    std::vector<std::tuple<int, int, double>> t;
    t.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k)
    {
        int i = 0, j = 0;
        double v = 0.0;
        if (!(is >> i >> j >> v))
            throw ParseError("truncated MatrixMarket entries", lineno);
        if (i < 1 || i > m || j < 1 || j > n)
            throw ParseError("MatrixMarket index out of range", lineno);
        t.emplace_back(i - 1, j - 1, v);
    }
    return SparseMatrix::from_triplets(m, n, t);
}

SparseMatrix read_matrix_market(const std::string& path)
{
    std::ifstream is(path);
    DERAMG_REQUIRE(is.good(), Error, "cannot open " + path);
    return read_matrix_market(is);
}

} // namespace deramg
