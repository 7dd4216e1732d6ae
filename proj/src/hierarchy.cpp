// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/hierarchy.hpp"

#include <cmath>
#include <numeric>

namespace deramg
{

namespace
{

std::vector<int> keep_map(const std::vector<unsigned char>& essential, int& n_keep)
{
    std::vector<int> map(essential.size(), -1);
    n_keep = 0;
    for (std::size_t i = 0; i < essential.size(); ++i)
        if (!essential[i])
            map[i] = n_keep++;
    return map;
}

} // namespace

SparseMatrix Hierarchy::reduce_matrix(const SparseMatrix& M,
                                      const std::vector<unsigned char>& row_ess,
                                      const std::vector<unsigned char>& col_ess) const
{
    int nr = 0, nc = 0;
    const std::vector<int> rmap = keep_map(row_ess, nr);
    const std::vector<int> cmap = keep_map(col_ess, nc);
    return M.submatrix(rmap, nr, cmap, nc);
}

Hierarchy::Hierarchy(const Mesh& mesh, int form_space, const Coefficient& coeff,
                     const HierarchyOptions& opt)
    : form_(form_space), fine_(build_fine_sequence(mesh, opt.target_order))
{
    DERAMG_REQUIRE(form_space == kHcurl || form_space == kHdiv, Error,
                   "hierarchies are built for H(curl) or H(div) forms");
    DERAMG_REQUIRE(opt.levels >= 1, Error, "need at least one level");

    // agglomerated topology chain
    std::vector<AgglomeratedTopology> steps;
    if (opt.trivial_partition)
    {
        const LevelTopology* t = &fine_.topo;
        for (int l = 1; l < opt.levels; ++l)
        {
            std::vector<int> parts(t->counts[3]);
            std::iota(parts.begin(), parts.end(), 0);
            steps.push_back(coarsen_topology(*t, parts));
            t = &steps.back().coarse;
        }
    }
    else
        steps = coarsen_recursive(fine_.topo,
                                  std::vector<int>(opt.levels - 1, opt.factor),
                                  opt.seed);

    const SequenceLevel* level = &fine_;
    for (const auto& step : steps)
    {
        coarse_.push_back(coarsen_sequence(*level, step, opt.coarsen));
        level = &coarse_.back().level;
    }

    // solver-side reduction: drop the essential (boundary) dofs
    const int L = static_cast<int>(coarse_.size()) + 1;
    const int s = form_;
    A_.reserve(L);
    for (int l = 0; l < L; ++l)
    {
        const SequenceLevel& lev = this->level(l);
        const auto& ess = lev.dof_boundary[s];
        int nk = 0;
        const std::vector<int> kmap = keep_map(ess, nk);
        std::vector<int> keep;
        keep.reserve(nk);
        for (std::size_t i = 0; i < ess.size(); ++i)
            if (!ess[i])
                keep.push_back(static_cast<int>(i));
        keep_.push_back(std::move(keep));

        D_red_.push_back(
            reduce_matrix(lev.derivative[s - 1], ess, lev.dof_boundary[s - 1]));
        // vector nodal space: three copies of the H1 flags
        std::vector<unsigned char> vess;
        for (int comp = 0; comp < 3; ++comp)
            vess.insert(vess.end(), lev.dof_boundary[kH1].begin(),
                        lev.dof_boundary[kH1].end());
        pihat_red_.push_back(reduce_matrix(lev.pi_hat[s - 1], ess, vess));
        if (s == kHdiv)
        {
            D0_red_.push_back(reduce_matrix(lev.derivative[s - 2],
                                            lev.dof_boundary[s - 1],
                                            lev.dof_boundary[s - 2]));
            pihat_prev_red_.push_back(
                reduce_matrix(lev.pi_hat[s - 2], lev.dof_boundary[s - 1], vess));
        }
        else
        {
            D0_red_.emplace_back();
            pihat_prev_red_.emplace_back();
        }
    }

    const SparseMatrix A0 =
        assemble_form(fine_, s, coeff, /*eliminate_essential=*/false);
    A_.push_back(reduce_matrix(A0, fine_.dof_boundary[s], fine_.dof_boundary[s]));
    for (int l = 0; l + 1 < L; ++l)
    {
        P_red_.push_back(reduce_matrix(coarse_[l].P[s],
                                       this->level(l).dof_boundary[s],
                                       this->level(l + 1).dof_boundary[s]));
        A_.push_back(rap(A_[l], P_red_[l]));
    }
}

Vector Hierarchy::reduce(int l, const Vector& full) const
{
    const auto& keep = keep_[l];
    Vector out(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        out[i] = full[keep[i]];
    return out;
}

Vector Hierarchy::prolong_to_full(int l, const Vector& reduced) const
{
    Vector out(level(l).dims[form_], 0.0);
    const auto& keep = keep_[l];
    for (std::size_t i = 0; i < keep.size(); ++i)
        out[keep[i]] = reduced[i];
    return out;
}

Vector Hierarchy::constant_load() const
{
    // (f, v) with f the constant unit field of the form space: the weighted
    // mass times the canonical interpolant of the constant; at lowest order
    // this is M * interp(1,1,1)-ish. The mass against a constant field is
    // exact with the local Gram matrices.
    const SparseMatrix M = assemble_mass(fine_, form_);
    // interpolant of the constant unit vector field along (1,1,1)/sqrt(3):
    // expressed through the nodal interpolation operator
    const int d0 = fine_.dims[kH1];
    Vector nodal(3 * d0, 1.0 / std::sqrt(3.0));
    const Vector u = fine_.pi_hat[form_ - 1].mult(nodal);
    return reduce(0, M.mult(u));
}

std::pair<double, double> Hierarchy::complexities() const
{
    double gc = 0.0, oc = 0.0;
    for (int l = 0; l < n_levels(); ++l)
    {
        gc += A_[l].rows();
        oc += A_[l].nnz();
    }
    return {gc / A_[0].rows(), oc / A_[0].nnz()};
}

void Hierarchy::corrupt_prolongator()
{
    DERAMG_REQUIRE(!coarse_.empty(), Error, "no prolongator to corrupt");
    auto& P = coarse_[0].P[form_];
    DERAMG_REQUIRE(P.nnz() > 0, Error, "empty prolongator");
    P.values()[0] += 0.5;
    if (!P_red_.empty() && P_red_[0].nnz() > 0)
        P_red_[0].values()[0] += 0.5;
}

std::pair<double, double> complexities(const Hierarchy& h)
{
    return h.complexities();
}

} // namespace deramg
