// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_SEQUENCE_HPP
#define DERAMG_SEQUENCE_HPP

#include <array>
#include <functional>
#include <map>

#include "deramg/dense_matrix.hpp"
#include "deramg/mesh.hpp"
#include "deramg/sparse_matrix.hpp"
#include "deramg/topology.hpp"

namespace deramg
{

/// Space indices within the sequence H1 -> H(curl) -> H(div) -> L2.
enum Space : int
{
    kH1 = 0,
    kHcurl = 1,
    kHdiv = 2,
    kL2 = 3
};

/// Per-attribute (alpha, beta) coefficient pairs, both positive.
class Coefficient
{
public:
    Coefficient() = default;
    Coefficient(std::initializer_list<std::pair<const int, std::pair<double, double>>> v)
        : values_(v)
    {
        for (const auto& [attr, ab] : values_)
            DERAMG_REQUIRE(attr >= 1 && ab.first > 0.0 && ab.second > 0.0, Error,
                           "coefficients must be positive with attribute >= 1");
    }

    void set(int attr, double alpha, double beta)
    {
        DERAMG_REQUIRE(attr >= 1 && alpha > 0.0 && beta > 0.0, Error,
                       "coefficients must be positive with attribute >= 1");
        values_[attr] = {alpha, beta};
    }

    double alpha(int attr) const { return find(attr).first; }
    double beta(int attr) const { return find(attr).second; }

    static Coefficient constant(double alpha, double beta)
    {
        Coefficient c;
        c.set(1, alpha, beta);
        return c;
    }

private:
    const std::pair<double, double>& find(int attr) const
    {
        const auto it = values_.find(attr);
        if (it == values_.end())
            throw UnknownAttribute("no coefficient for attribute " +
                                   std::to_string(attr));
        return it->second;
    }
    std::map<int, std::pair<double, double>> values_;
};

/// Local (trace) mass matrices of one space on all entities of one
/// dimension: for each entity, the space dofs on its closure and the dense
/// Gram matrix of the local shape functions in the L2 product of that
/// entity.
struct LocalMassSet
{
    std::vector<std::vector<int>> dofs;
    std::vector<DenseMatrix> mats;

    bool empty() const { return dofs.empty(); }
};

/// One level of the de Rham hierarchy. At the finest level dofs coincide
/// with mesh entities and the derivatives are the signed incidence
/// matrices; coarse levels carry the same structure over coarse entities
/// with extra bubble dofs on higher-dimensional entities.
struct SequenceLevel
{
    LevelTopology topo;

    std::array<int, 4> dims = {0, 0, 0, 0};

    /// derivative[s]: space s -> s+1. Entries are exact signed incidence at
    /// the finest level; on coarse levels they come from the extension
    /// solves. The L2-valued operator form of derivative[2] carries the
    /// value-convention scaling below.
    std::array<SparseMatrix, 3> derivative;

    /// D_2^op = diag(l2_op_scale) * derivative[2]; ones on coarse levels,
    /// 1/|tau| at the finest level (value-convention L2 dofs).
    Vector l2_op_scale;

    // per space: dof -> owning entity and flags
    std::array<std::vector<int>, 4> dof_entity_dim;
    std::array<std::vector<int>, 4> dof_entity_id;
    std::array<std::vector<unsigned char>, 4> dof_boundary;
    std::array<std::vector<unsigned char>, 4> dof_is_pv;
    /// entity-integral functional weight of each dof (zero for the
    /// zero-mean dofs on coarse levels)
    std::array<Vector, 4> dof_integral_weight;

    /// dofs_on_entity[s][k][id]: space-s dofs interior to entity (k, id)
    std::array<std::array<std::vector<std::vector<int>>, 4>, 4> dofs_on_entity;

    /// mass[s][k]: local L2 Gram matrices of space s on dim-k entities,
    /// k = s..3
    std::array<std::array<LocalMassSet, 4>, 4> mass;

    /// targets[s]: columns are target vectors in space-s dofs
    std::array<DenseMatrix, 4> targets;

    /// pi_hat[0] -> H(curl), pi_hat[1] -> H(div); columns indexed
    /// comp * d_0 + vertex over the vector nodal space
    std::array<SparseMatrix, 2> pi_hat;

    /// representation of the constant 1 function in L2 dofs
    Vector l2_const_rep;

    int dim(int s) const { return dims[s]; }

    SparseMatrix derivative_op(int s) const;

    /// D_{s+1} D_s = 0 on the stored matrices (exact at the finest level).
    void check_complex(double tol = 0.0) const;
};

/// Lowest-order fine sequence on a tetrahedral mesh: dof per mesh entity,
/// incidence derivatives, closed-form local mass matrices, nodal
/// interpolation targets of component degree <= target_order, and the
/// vector-nodal interpolation operators.
SequenceLevel build_fine_sequence(const Mesh& mesh, int target_order = 1);

/// Weighted mass matrix of one space, weight piecewise constant per
/// element (size = number of elements).
SparseMatrix assemble_mass(const SequenceLevel& level, int space,
                           const Vector& element_weight);
SparseMatrix assemble_mass(const SequenceLevel& level, int space);

/// Per-element weight vector from a coefficient component.
Vector alpha_weights(const SequenceLevel& level, const Coefficient& coeff);
Vector beta_weights(const SequenceLevel& level, const Coefficient& coeff);

/// A = D_s^T M_{s+1}(alpha) D_s + M_s(beta) for space kHcurl or kHdiv, with
/// homogeneous essential boundary conditions eliminated symmetrically
/// (unit diagonal) when eliminate_essential is set.
SparseMatrix assemble_form(const SequenceLevel& level, int space,
                           const Coefficient& coeff,
                           bool eliminate_essential = true);

/// Canonical dof interpolation of an analytic function: vertex values /
/// edge tangential integrals / facet normal fluxes / element averages.
/// Fine level only (needs coordinates).
Vector interpolate(const SequenceLevel& level, const Mesh& mesh, int space,
                   const std::function<double(const Point&)>& scalar_f);
Vector interpolate(const SequenceLevel& level, const Mesh& mesh, int space,
                   const std::function<Point(const Point&)>& vector_f);

} // namespace deramg

#endif
