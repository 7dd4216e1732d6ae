// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DERAMG_HIERARCHY_HPP
#define DERAMG_HIERARCHY_HPP

#include "deramg/coarsen.hpp"
#include "deramg/mesh.hpp"

namespace deramg
{

struct HierarchyOptions
{
    int levels = 3;       // total number of levels, >= 1
    int factor = 8;       // elements per agglomerate target
    int target_order = 1; // polynomial target order
    unsigned seed = 0;
    CoarsenOptions coarsen;
    bool trivial_partition = false; // identity coarsening (testing)
};

/// AMGe hierarchy for one H(curl) or H(div) form: the full de Rham
/// sequence chain plus the solver-side operators restricted to the
/// non-essential dofs (homogeneous essential conditions on the whole
/// boundary). Level 0 is the finest.
class Hierarchy
{
public:
    Hierarchy(const Mesh& mesh, int form_space, const Coefficient& coeff,
              const HierarchyOptions& opt);

    int form() const { return form_; }
    int n_levels() const { return static_cast<int>(A_.size()); }

    const SparseMatrix& system(int l) const { return A_[l]; }
    /// reduced prolongator from level l+1 to level l
    const SparseMatrix& prolongator(int l) const { return P_red_[l]; }
    /// reduced exterior derivative D_{s-1} at level l (hybrid smoother)
    const SparseMatrix& kernel_transfer(int l) const { return D_red_[l]; }
    /// reduced vector-nodal interpolation at level l (auxiliary space)
    const SparseMatrix& nodal_interp(int l) const { return pihat_red_[l]; }
    /// same operators one space lower, for the nested H(curl) block of an
    /// H(div) auxiliary-space solver
    const SparseMatrix& kernel_transfer_prev(int l) const { return D0_red_[l]; }
    const SparseMatrix& nodal_interp_prev(int l) const
    {
        return pihat_prev_red_[l];
    }

    const SequenceLevel& level(int l) const
    {
        return l == 0 ? fine_ : coarse_[l - 1].level;
    }
    /// sequence-level (unreduced) operators of step l -> l+1
    const std::array<SparseMatrix, 4>& sequence_p(int l) const
    {
        return coarse_[l].P;
    }
    const std::array<SparseMatrix, 4>& sequence_pi(int l) const
    {
        return coarse_[l].Pi;
    }

    /// load vector of a constant unit source, reduced to the solver dofs
    Vector constant_load() const;

    Vector reduce(int l, const Vector& full) const;
    Vector prolong_to_full(int l, const Vector& reduced) const;

    /// grid and operator complexity over the hierarchy
    std::pair<double, double> complexities() const;

    /// testing hook: corrupt the first prolongator entry
    void corrupt_prolongator();

private:
    int form_;
    SequenceLevel fine_;
    std::vector<CoarsenedLevel> coarse_;

    std::vector<std::vector<int>> keep_;      // kept (interior) form dofs per level
    std::vector<SparseMatrix> A_;
    std::vector<SparseMatrix> P_red_;
    std::vector<SparseMatrix> D_red_;
    std::vector<SparseMatrix> pihat_red_;
    std::vector<SparseMatrix> D0_red_;
    std::vector<SparseMatrix> pihat_prev_red_;

    SparseMatrix reduce_matrix(const SparseMatrix& M,
                               const std::vector<unsigned char>& row_ess,
                               const std::vector<unsigned char>& col_ess) const;
};

std::pair<double, double> complexities(const Hierarchy& h);

} // namespace deramg

#endif
