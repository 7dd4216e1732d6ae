// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_MATRIX_MARKET_HPP
#define DERAMG_MATRIX_MARKET_HPP

#include <iosfwd>
#include <string>

#include "deramg/sparse_matrix.hpp"

namespace deramg
{

/// MatrixMarket coordinate format, header
/// "%%MatrixMarket matrix coordinate real general", 1-based indices.
void write_matrix_market(const SparseMatrix& A, std::ostream& os);
void write_matrix_market(const SparseMatrix& A, const std::string& path);

SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market(const std::string& path);

} // namespace deramg

#endif
