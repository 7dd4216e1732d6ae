// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "deramg/svd.hpp"

namespace deramg
{

namespace
{

// Dense Cholesky factor (lower triangular) of a small SPD Gram matrix.
DenseMatrix dense_cholesky(const DenseMatrix& M, int context)
{
    const int n = M.rows();
    DenseMatrix L(n, n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j <= i; ++j)
        {
            double s = M(i, j);
            for (int k = 0; k < j; ++k)
                s -= L(i, k) * L(j, k);
            if (i == j)
            {
                if (s <= 0.0)
                    throw SingularLocalSystem("local Gram matrix not SPD", context);
                L(i, i) = std::sqrt(s);
            }
            else
                L(i, j) = s / L(j, j);
        }
    }
    return L;
}

// solve L^T X = B columnwise (L lower triangular)
DenseMatrix solve_lt(const DenseMatrix& L, const DenseMatrix& B)
{
    const int n = L.rows();
    DenseMatrix X = B;
    for (int c = 0; c < B.cols(); ++c)
        for (int i = n - 1; i >= 0; --i)
        {
            double s = X(i, c);
            for (int k = i + 1; k < n; ++k)
                s -= L(k, i) * X(k, c);
            X(i, c) = s / L(i, i);
        }
    return X;
}

DenseMatrix mat_mul_tn(const DenseMatrix& A, const DenseMatrix& B)
{
    // A^T * B
    DenseMatrix C(A.cols(), B.cols());
    for (int k = 0; k < A.rows(); ++k)
        for (int i = 0; i < A.cols(); ++i)
        {
            const double a = A(k, i);
            if (a == 0.0)
                continue;
            for (int j = 0; j < B.cols(); ++j)
                C(i, j) += a * B(k, j);
        }
    return C;
}

enum class DofKind : char
{
    Pv,
    Trace,
    RangeT,
    DFree
};

struct SpaceState
{
    std::vector<int> ent_dim, ent_id;
    std::vector<DofKind> kind;
    std::vector<std::vector<std::pair<int, double>>> cols;  // in fine dofs
    std::vector<std::vector<std::pair<int, double>>> dcols; // rows in space s+1
    std::array<std::vector<std::vector<int>>, 4> ents;      // [k][X] -> dofs

    int count() const { return static_cast<int>(ent_dim.size()); }

    int add_dof(int dim, int id, DofKind k)
    {
        const int dof = count();
        ent_dim.push_back(dim);
        ent_id.push_back(id);
        kind.push_back(k);
        cols.emplace_back();
        dcols.emplace_back();
        ents[dim][id].push_back(dof);
        return dof;
    }
};

class Coarsener
{
public:
    Coarsener(const SequenceLevel& fine, const AgglomeratedTopology& step,
              const CoarsenOptions& opt)
        : F(fine), S(step), opt_(opt), DA(agglomerate_dofs(fine, step))
    {
        for (int s = 0; s < 4; ++s)
            for (int k = 0; k < 4; ++k)
                st_[s].ents[k].assign(S.coarse.counts[k], {});
    }

    CoarsenedLevel run();

private:
    const SequenceLevel& F;
    const AgglomeratedTopology& S;
    CoarsenOptions opt_;
    DofAgglomeration DA;
    std::array<SpaceState, 4> st_;

    // fine members (ids and signs) of a coarse entity
    std::vector<std::pair<int, int>> members(int k, int X) const
    {
        switch (k)
        {
        case 0:
            return {{S.av_vertex[X], 1}};
        case 1:
            return {S.aedge_edge[X].begin(), S.aedge_edge[X].end()};
        case 2:
            return {S.af_facet[X].begin(), S.af_facet[X].end()};
        default:
        {
            std::vector<std::pair<int, int>> m;
            for (const int e : S.ae_element[X])
                m.emplace_back(e, 1);
            return m;
        }
        }
    }

    static std::unordered_map<int, int> local_map(const std::vector<int>& ids)
    {
        std::unordered_map<int, int> m;
        m.reserve(ids.size() * 2);
        for (std::size_t i = 0; i < ids.size(); ++i)
            m[ids[i]] = static_cast<int>(i);
        return m;
    }

    // local L2 Gram of space s on coarse entity (k, X) over the closure dofs
    DenseMatrix local_mass(int s, int k, int X, const std::vector<int>& cls,
                           const std::unordered_map<int, int>& lmap) const
    {
        DenseMatrix M(static_cast<int>(cls.size()), static_cast<int>(cls.size()));
        const auto& set = F.mass[s][k];
        for (const auto& [x, sign] : members(k, X))
        {
            const auto& dofs = set.dofs[x];
            const auto& A = set.mats[x];
            for (std::size_t i = 0; i < dofs.size(); ++i)
            {
                const auto it = lmap.find(dofs[i]);
                DERAMG_REQUIRE(it != lmap.end(), TopologyError,
                               "local dof outside coarse closure");
                for (std::size_t j = 0; j < dofs.size(); ++j)
                    M(it->second, lmap.at(dofs[j])) += A(int(i), int(j));
            }
        }
        return M;
    }

    // operator-convention derivative restricted to local dof sets
    DenseMatrix local_derivative(int s, const std::vector<int>& rows,
                                 const std::vector<int>& cols) const
    {
        const auto cmap = local_map(cols);
        DenseMatrix D(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
        {
            const int g = rows[r];
            const double scale = (s == 2) ? F.l2_op_scale[g] : 1.0;
            auto cc = F.derivative[s].row_cols(g);
            auto vv = F.derivative[s].row_values(g);
            for (std::size_t k = 0; k < cc.size(); ++k)
            {
                const auto it = cmap.find(cc[k]);
                if (it != cmap.end())
                    D(int(r), it->second) = scale * vv[k];
            }
        }
        return D;
    }

    // column of a coarse dof gathered onto a local dof list
    Vector restrict_col(int s, int dof, const std::unordered_map<int, int>& lmap,
                        int n_local) const
    {
        Vector v(n_local, 0.0);
        for (const auto& [g, val] : st_[s].cols[dof])
        {
            const auto it = lmap.find(g);
            if (it != lmap.end())
                v[it->second] = val;
        }
        return v;
    }

    void write_col(int s, int dof, const std::vector<int>& ids, const Vector& vals)
    {
        auto& col = st_[s].cols[dof];
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (vals[i] != 0.0)
                col.emplace_back(ids[i], vals[i]);
    }

    void init_stage(int s);
    void extend_stage(int s, int k);

    SparseMatrix build_p(int s) const;
    SparseMatrix build_d(int s) const;
    SparseMatrix build_pi(int s, const SparseMatrix& P,
                          const SparseMatrix* pi_next) const;

    void fill_metadata(SequenceLevel& C, const std::array<SparseMatrix, 4>& P,
                       const std::array<SparseMatrix, 4>& Pi) const;
    void run_checks(const CoarsenedLevel& out) const;
};

void Coarsener::init_stage(int s)
{
    const int nX = S.coarse.counts[s];
    for (int X = 0; X < nX; ++X)
    {
        const auto& I = DA.interior[s][s][X];
        DERAMG_REQUIRE(!I.empty(), TopologyError,
                       "coarse entity without interior dofs");
        const auto lmap = local_map(I);
        const int n = static_cast<int>(I.size());

        // signed integral functional over this entity
        Vector w(n, 0.0);
        for (const auto& [x, sign] : members(s, X))
            for (const int d : F.dofs_on_entity[s][s][x])
                w[lmap.at(d)] = sign * F.dof_integral_weight[s][d];

        // PV trace: signed sum of constituent PV dofs (the constant-one
        // representation for L2), normalized to unit integral
        Vector raw(n, 0.0);
        if (s == kL2)
        {
            for (int i = 0; i < n; ++i)
                raw[i] = F.l2_const_rep[I[i]];
        }
        else
        {
            for (const auto& [x, sign] : members(s, X))
            {
                const int pv = F.dofs_on_entity[s][s][x].front();
                DERAMG_REQUIRE(F.dof_is_pv[s][pv], TopologyError,
                               "constituent entity has no PV dof first");
                raw[lmap.at(pv)] = sign;
            }
        }
        double integral = 0.0;
        for (int i = 0; i < n; ++i)
            integral += w[i] * raw[i];
        if (std::abs(integral) < 1e-300)
            throw ZeroMeasureEntity("PV trace with vanishing integral on entity " +
                                    std::to_string(X));
        Vector pv(n);
        for (int i = 0; i < n; ++i)
            pv[i] = raw[i] / integral;

        const int pvdof = st_[s].add_dof(s, X, DofKind::Pv);
        write_col(s, pvdof, I, pv);

        if (F.targets[s].cols() == 0 || n == 1)
            continue;

        const DenseMatrix M = local_mass(s, s, X, I, lmap);
        const DenseMatrix L = dense_cholesky(M, X);

        // deflate the PV trace and the integral functional (so surviving
        // trace dofs have exactly zero mean on the entity)
        DenseMatrix W(n, 2);
        {
            const Vector mw = LuFactors(M, X).solve(w);
            for (int i = 0; i < n; ++i)
            {
                W(i, 0) = pv[i];
                W(i, 1) = mw[i];
            }
        }
        DenseMatrix T(n, F.targets[s].cols());
        for (int c = 0; c < T.cols(); ++c)
            for (int i = 0; i < n; ++i)
                T(i, c) = F.targets[s](I[i], c);

        const DenseMatrix Q = svd_orthonormal_complement(
            L.transposed().mult(T), L.transposed().mult(W), opt_.svd_tol);
        if (Q.cols() == 0)
            continue;
        const DenseMatrix cols = solve_lt(L, Q);
        for (int c = 0; c < cols.cols(); ++c)
        {
            const int dof = st_[s].add_dof(s, X, DofKind::Trace);
            write_col(s, dof, I, cols.column(c));
        }
    }
}

void Coarsener::extend_stage(int s, int k)
{
    const int nX = S.coarse.counts[k];
    const bool lowest = (k == s + 1);

    for (int X = 0; X < nX; ++X)
    {
        const std::vector<int> cls = DA.closure_dofs(s, k, X);
        const std::vector<int>& interior = DA.interior[s][k][X];
        const auto lmap = local_map(cls);
        const int n_cls = static_cast<int>(cls.size());
        const int nI = static_cast<int>(interior.size());

        std::vector<int> iloc(nI);
        for (int i = 0; i < nI; ++i)
            iloc[i] = lmap.at(interior[i]);
        std::vector<unsigned char> is_int(n_cls, 0);
        for (const int i : iloc)
            is_int[i] = 1;
        std::vector<int> bloc;
        for (int i = 0; i < n_cls; ++i)
            if (!is_int[i])
                bloc.push_back(i);

        const std::vector<int> cls_p = DA.closure_dofs(s + 1, k, X);
        const std::vector<int>& int_p = DA.interior[s + 1][k][X];
        const auto pmap = local_map(cls_p);
        const int n_p = static_cast<int>(cls_p.size());
        std::vector<int> ploc(int_p.size());
        for (std::size_t i = 0; i < int_p.size(); ++i)
            ploc[i] = pmap.at(int_p[i]);
        const int nP = static_cast<int>(int_p.size());

        const DenseMatrix M0 = local_mass(s, k, X, cls, lmap);
        const DenseMatrix M1 = local_mass(s + 1, k, X, cls_p, pmap);
        const DenseMatrix Dl = local_derivative(s, cls_p, cls);

        // MB = (M1 Dl) restricted to interior space-(s+1) test rows
        DenseMatrix M1D(n_p, n_cls);
        for (int i = 0; i < n_p; ++i)
            for (int j = 0; j < n_cls; ++j)
            {
                double acc = 0.0;
                for (int t = 0; t < n_p; ++t)
                    acc += M1(i, t) * Dl(t, j);
                M1D(i, j) = acc;
            }
        DenseMatrix MB(nP, n_cls);
        for (int i = 0; i < nP; ++i)
            for (int j = 0; j < n_cls; ++j)
                MB(i, j) = M1D(ploc[i], j);

        // signed integral functional of space s+1 on (k, X), for the
        // Stokes value of the multiplier
        Vector wp(n_p, 0.0);
        for (const auto& [x, sign] : members(k, X))
            for (const int d : F.dofs_on_entity[s + 1][k][x])
            {
                const auto it = pmap.find(d);
                if (it != pmap.end())
                    wp[it->second] = sign * F.dof_integral_weight[s + 1][d];
            }

        // saddle system
        int n_sys;
        Vector pv_loc;
        int pv_dof = -1;
        if (lowest)
        {
            pv_dof = st_[s + 1].ents[k][X].front();
            DERAMG_REQUIRE(st_[s + 1].kind[pv_dof] == DofKind::Pv,
                           TopologyError, "missing PV dof on extension target");
            pv_loc = restrict_col(s + 1, pv_dof, pmap, n_p);
            n_sys = nI + nP + 1;
        }
        else
            n_sys = nI + nP;

        DenseMatrix A(n_sys, n_sys);
        for (int i = 0; i < nI; ++i)
            for (int j = 0; j < nI; ++j)
                A(i, j) = M0(iloc[i], iloc[j]);
        for (int i = 0; i < nP; ++i)
            for (int j = 0; j < nI; ++j)
            {
                const double v = MB(i, iloc[j]);
                A(nI + i, j) = v;
                A(j, nI + i) = v;
            }
        if (lowest)
        {
            Vector g(nP, 0.0);
            for (int i = 0; i < nP; ++i)
                for (int t = 0; t < n_p; ++t)
                    g[i] += M1(ploc[i], t) * pv_loc[t];
            for (int i = 0; i < nP; ++i)
            {
                A(nI + i, nI + nP) = -g[i];
                A(nI + nP, nI + i) = -g[i];
            }
        }
        else
        {
            // stabilization (D_{s+1} chi, D_{s+1} z) over the entity
            const std::vector<int> cls_q = DA.closure_dofs(s + 2, k, X);
            const auto qmap = local_map(cls_q);
            const DenseMatrix M2 = local_mass(s + 2, k, X, cls_q, qmap);
            const DenseMatrix D2 = local_derivative(s + 1, cls_q, cls_p);
            const int n_q = static_cast<int>(cls_q.size());
            DenseMatrix DE(n_q, nP);
            for (int i = 0; i < n_q; ++i)
                for (int j = 0; j < nP; ++j)
                    DE(i, j) = D2(i, ploc[j]);
            const DenseMatrix C = mat_mul_tn(DE, M2.mult(DE));
            for (int i = 0; i < nP; ++i)
                for (int j = 0; j < nP; ++j)
                    A(nI + i, nI + j) = -C(i, j);
        }

        // Symmetric equilibration: the mass and stabilization blocks live on
        // very different scales, which would otherwise starve the pivot test.
        Vector eq(n_sys, 1.0);
        for (int i = 0; i < n_sys; ++i)
        {
            double mx = 0.0;
            for (int j = 0; j < n_sys; ++j)
                mx = std::max(mx, std::abs(A(i, j)));
            if (mx > 0.0)
                eq[i] = 1.0 / std::sqrt(mx);
        }
        for (int i = 0; i < n_sys; ++i)
            for (int j = 0; j < n_sys; ++j)
                A(i, j) *= eq[i] * eq[j];

        // The multiplier block of the higher extension can be legitimately
        // rank-deficient on irregular agglomerates while the interior
        // solution stays unique; fall back to a least-squares solve there
        // and verify the residual, so inconsistent systems still fail hard.
        std::unique_ptr<LuFactors> lu;
        std::unique_ptr<SvdResult> pinv;
        if (nI > 0)
        {
            try
            {
                lu = std::make_unique<LuFactors>(A, X);
            }
            catch (const SingularLocalSystem&)
            {
                pinv = std::make_unique<SvdResult>(svd(A));
            }
        }

        auto solve_interior = [&](Vector rhs) {
            for (int i = 0; i < n_sys; ++i)
                rhs[i] *= eq[i];
            Vector sol;
            if (lu)
                sol = lu->solve(rhs);
            else
            {
                const double smax = pinv->sigma.empty() ? 0.0 : pinv->sigma[0];
                const Vector ur = pinv->u.mult_transpose(rhs);
                Vector coef(n_sys, 0.0);
                for (int i = 0; i < n_sys; ++i)
                    if (pinv->sigma[i] > 1e-12 * smax)
                        coef[i] = ur[i] / pinv->sigma[i];
                sol = pinv->v.mult(coef);
                const Vector res = [&] {
                    Vector az(n_sys, 0.0);
                    for (int i = 0; i < n_sys; ++i)
                        for (int j = 0; j < n_sys; ++j)
                            az[i] += A(i, j) * sol[j];
                    for (int i = 0; i < n_sys; ++i)
                        az[i] -= rhs[i];
                    return az;
                }();
                const double rn = norm2(res);
                if (rn > 1e-9 * (smax * norm2(sol) + norm2(rhs) + 1.0))
                    throw SingularLocalSystem(
                        "inconsistent singular extension system (space " +
                            std::to_string(s) + ", entity dim " +
                            std::to_string(k) + ")",
                        X);
            }
            for (int i = 0; i < n_sys; ++i)
                sol[i] *= eq[i];
            return sol;
        };

        // ---- extend every previously built coarse dof on the strict
        // boundary of the entity
        for (const auto& [dim, id] : DA.closure_ents_for_space(s, k, X))
        {
            if (dim == k)
                continue;
            for (const int eta : st_[s].ents[dim][id])
            {
                const Vector mu = restrict_col(s, eta, lmap, n_cls);
                Vector rhs(n_sys, 0.0);
                for (int i = 0; i < nI; ++i)
                {
                    double acc = 0.0;
                    for (const int b : bloc)
                        acc += M0(iloc[i], b) * mu[b];
                    rhs[i] = -acc;
                }
                if (lowest)
                {
                    for (int i = 0; i < nP; ++i)
                    {
                        double acc = 0.0;
                        for (const int b : bloc)
                            acc += MB(i, b) * mu[b];
                        rhs[nI + i] = -acc;
                    }
                    // c is known from Stokes' theorem; keep it as an unknown
                    // and use the closed form as a consistency check
                    const Vector dmu = Dl.mult(mu);
                    double c_exp = 0.0;
                    for (int t = 0; t < n_p; ++t)
                        c_exp += wp[t] * dmu[t];
                    double c_val = c_exp;
                    if (nI > 0)
                    {
                        const Vector sol = solve_interior(rhs);
                        Vector x(nI);
                        for (int i = 0; i < nI; ++i)
                            x[i] = sol[i];
                        write_col(s, eta, interior, x);
                        c_val = sol[nI + nP];
                        DERAMG_REQUIRE(
                            std::abs(c_val - c_exp) <=
                                1e-8 * (1.0 + std::abs(c_exp)),
                            ExactnessViolation,
                            "extension multiplier disagrees with Stokes value");
                    }
                    if (std::abs(c_val) > 1e-12)
                        st_[s].dcols[eta].emplace_back(pv_dof, c_val);
                }
                else
                {
                    // known coarse image of the derivative on this entity
                    Vector s_loc(n_p, 0.0);
                    for (const auto& [row, val] : st_[s].dcols[eta])
                    {
                        for (const auto& [g, pval] : st_[s + 1].cols[row])
                        {
                            const auto it = pmap.find(g);
                            if (it != pmap.end())
                                s_loc[it->second] += val * pval;
                        }
                    }
                    if (nI == 0)
                        continue;
                    for (int i = 0; i < nP; ++i)
                    {
                        double acc = 0.0;
                        for (int t = 0; t < n_p; ++t)
                            acc += M1(ploc[i], t) * s_loc[t];
                        for (const int b : bloc)
                            acc -= MB(i, b) * mu[b];
                        rhs[nI + i] = acc;
                    }
                    const Vector sol = solve_interior(rhs);
                    Vector x(nI);
                    for (int i = 0; i < nI; ++i)
                        x[i] = sol[i];
                    write_col(s, eta, interior, x);
                }
            }
        }

        // ---- bubbles: preimages of the space-(s+1) kernel dofs on X
        const DofKind source_kind = lowest ? DofKind::Trace : DofKind::DFree;
        for (const int src : st_[s + 1].ents[k][X])
        {
            if (st_[s + 1].kind[src] != source_kind)
                continue;
            DERAMG_REQUIRE(nI > 0, SingularLocalSystem,
                           "kernel dof without interior preimage space");
            const Vector phi = restrict_col(s + 1, src, pmap, n_p);
            Vector rhs(n_sys, 0.0);
            for (int i = 0; i < nP; ++i)
            {
                double acc = 0.0;
                for (int t = 0; t < n_p; ++t)
                    acc += M1(ploc[i], t) * phi[t];
                rhs[nI + i] = acc;
            }
            const Vector sol = solve_interior(rhs);
            if (lowest)
                DERAMG_REQUIRE(std::abs(sol[nI + nP]) <= 1e-8,
                               ExactnessViolation,
                               "bubble extension has a nonzero mean source");
            const int dof = st_[s].add_dof(k, X, DofKind::RangeT);
            Vector x(nI);
            for (int i = 0; i < nI; ++i)
                x[i] = sol[i];
            write_col(s, dof, interior, x);
            st_[s].dcols[dof].emplace_back(src, 1.0);
        }

        // ---- derivative-free bubbles from the approximation targets
        if (F.targets[s].cols() > 0 && nI > 0)
        {
            DenseMatrix Dd(n_p, nI);
            for (int i = 0; i < n_p; ++i)
                for (int j = 0; j < nI; ++j)
                    Dd(i, j) = Dl(i, iloc[j]);
            const DenseMatrix Z = nullspace(Dd, 1e-9);
            if (Z.cols() > 0)
            {
                DenseMatrix M_II(nI, nI);
                for (int i = 0; i < nI; ++i)
                    for (int j = 0; j < nI; ++j)
                        M_II(i, j) = M0(iloc[i], iloc[j]);
                DenseMatrix T(nI, F.targets[s].cols());
                for (int c = 0; c < T.cols(); ++c)
                    for (int i = 0; i < nI; ++i)
                        T(i, c) = F.targets[s](interior[i], c);

                // L2 projection of the targets onto the local kernel
                const DenseMatrix MZ = M_II.mult(Z);
                const DenseMatrix G = mat_mul_tn(Z, MZ);
                const DenseMatrix R = mat_mul_tn(MZ, T); // Z^T M T
                LuFactors glu(G, X);
                DenseMatrix Acoef(Z.cols(), T.cols());
                for (int c = 0; c < T.cols(); ++c)
                {
                    Vector col(Z.cols());
                    for (int i = 0; i < Z.cols(); ++i)
                        col[i] = R(i, c);
                    col = glu.solve(col);
                    for (int i = 0; i < Z.cols(); ++i)
                        Acoef(i, c) = col[i];
                }
                const DenseMatrix proj = Z.mult(Acoef);

                const DenseMatrix L = dense_cholesky(M_II, X);
                const DenseMatrix Q = svd_orthonormal_complement(
                    L.transposed().mult(proj), DenseMatrix(nI, 0), opt_.svd_tol);
                if (Q.cols() > 0)
                {
                    const DenseMatrix cols = solve_lt(L, Q);
                    for (int c = 0; c < cols.cols(); ++c)
                    {
                        const int dof = st_[s].add_dof(k, X, DofKind::DFree);
                        write_col(s, dof, interior, cols.column(c));
                    }
                }
            }
        }
    }
}

SparseMatrix Coarsener::build_p(int s) const
{
    std::vector<std::tuple<int, int, double>> trip;
    for (int c = 0; c < st_[s].count(); ++c)
        for (const auto& [g, v] : st_[s].cols[c])
            trip.emplace_back(g, c, v);
    return SparseMatrix::from_triplets(F.dims[s], st_[s].count(), trip);
}

SparseMatrix Coarsener::build_d(int s) const
{
    std::vector<std::tuple<int, int, double>> trip;
    for (int c = 0; c < st_[s].count(); ++c)
        for (const auto& [r, v] : st_[s].dcols[c])
            trip.emplace_back(r, c, v);
    return SparseMatrix::from_triplets(st_[s + 1].count(), st_[s].count(), trip);
}

SparseMatrix Coarsener::build_pi(int s, const SparseMatrix& P,
                                 const SparseMatrix* pi_next) const
{
    // Rows are built in global dof order. Three row kinds:
    //  - PV rows apply the signed entity-integral functional (every other
    //    coarse trace dof has zero mean, so this is the PV coefficient on
    //    the coarse space and it makes the projectors commute with the
    //    derivatives);
    //  - derivative-preimage bubbles take their coefficient through the
    //    next space: row = Pi_{s+1}[source] * D_s;
    //  - zero-mean traces and derivative-free bubbles are local L2
    //    projections of the residual.
    using Row = std::vector<std::pair<int, double>>;
    std::vector<Row> rows(st_[s].count());

    const SparseMatrix Dop = (s < 3) ? F.derivative_op(s) : SparseMatrix();

    for (int k = s; k < 4; ++k)
        for (int X = 0; X < S.coarse.counts[k]; ++X)
        {
            const auto& dofs = st_[s].ents[k][X];
            if (dofs.empty())
                continue;
            const std::vector<int>& I = DA.interior[s][k][X];
            const auto imap = local_map(I);
            const int nI = static_cast<int>(I.size());

            DenseMatrix M_II;
            const bool need_mass =
                std::any_of(dofs.begin(), dofs.end(), [&](int d) {
                    return st_[s].kind[d] == DofKind::Trace ||
                           st_[s].kind[d] == DofKind::DFree;
                });
            if (need_mass)
            {
                if (k == s)
                    M_II = local_mass(s, s, X, I, imap);
                else
                {
                    const std::vector<int> cls = DA.closure_dofs(s, k, X);
                    const auto lmap = local_map(cls);
                    const DenseMatrix M = local_mass(s, k, X, cls, lmap);
                    M_II = DenseMatrix(nI, nI);
                    for (int i = 0; i < nI; ++i)
                        for (int j = 0; j < nI; ++j)
                            M_II(i, j) = M(lmap.at(I[i]), lmap.at(I[j]));
                }
            }

            for (const int d : dofs)
            {
                Row& row = rows[d];
                switch (st_[s].kind[d])
                {
                case DofKind::Pv:
                {
                    for (const auto& [x, sign] : members(s, X))
                        for (const int fd : F.dofs_on_entity[s][s][x])
                            if (F.dof_integral_weight[s][fd] != 0.0)
                                row.emplace_back(
                                    fd, sign * F.dof_integral_weight[s][fd]);
                    break;
                }
                case DofKind::RangeT:
                {
                    DERAMG_REQUIRE(pi_next && s < 3, TopologyError,
                                   "preimage row requires the next projector");
                    const int src = st_[s].dcols[d].front().first;
                    std::unordered_map<int, double> acc;
                    auto cc = pi_next->row_cols(src);
                    auto vv = pi_next->row_values(src);
                    for (std::size_t t = 0; t < cc.size(); ++t)
                    {
                        auto dc = Dop.row_cols(cc[t]);
                        auto dv = Dop.row_values(cc[t]);
                        for (std::size_t q = 0; q < dc.size(); ++q)
                            acc[dc[q]] += vv[t] * dv[q];
                    }
                    row.assign(acc.begin(), acc.end());
                    std::sort(row.begin(), row.end());
                    break;
                }
                case DofKind::Trace:
                case DofKind::DFree:
                {
                    // raw = shape^T M_II on the interior dofs
                    const Vector shape = restrict_col(s, d, imap, nI);
                    const Vector raw = M_II.mult(shape);
                    // subtract already-assigned coarse content:
                    // row = raw - sum_c (raw . P e_c) rows[c]
                    std::unordered_map<int, double> acc;
                    for (int i = 0; i < nI; ++i)
                        if (raw[i] != 0.0)
                            acc[I[i]] += raw[i];
                    // coefficients against existing columns
                    std::unordered_map<int, double> coef;
                    for (int i = 0; i < nI; ++i)
                    {
                        if (raw[i] == 0.0)
                            continue;
                        auto pc = P.row_cols(I[i]);
                        auto pval = P.row_values(I[i]);
                        for (std::size_t q = 0; q < pc.size(); ++q)
                            if (pc[q] < d)
                                coef[pc[q]] += raw[i] * pval[q];
                    }
                    for (const auto& [c, w] : coef)
                    {
                        if (w == 0.0)
                            continue;
                        for (const auto& [fd, val] : rows[c])
                            acc[fd] -= w * val;
                    }
                    for (auto& [fd, val] : acc)
                        if (val != 0.0)
                            row.emplace_back(fd, val);
                    std::sort(row.begin(), row.end());
                    break;
                }
                }
            }
        }

    std::vector<std::tuple<int, int, double>> trip;
    for (int d = 0; d < st_[s].count(); ++d)
        for (const auto& [fd, val] : rows[d])
            trip.emplace_back(d, fd, val);
    return SparseMatrix::from_triplets(st_[s].count(), F.dims[s], trip);
}

void Coarsener::fill_metadata(SequenceLevel& C, const std::array<SparseMatrix, 4>& P,
                              const std::array<SparseMatrix, 4>& Pi) const
{
    C.topo = S.coarse;
    for (int s = 0; s < 4; ++s)
        C.dims[s] = st_[s].count();

    for (int s = 0; s < 3; ++s)
        C.derivative[s] = build_d(s);
    C.l2_op_scale.assign(C.dims[kL2], 1.0);

    std::array<std::vector<unsigned char>, 4> ent_bdr;
    for (int k = 0; k < 4; ++k)
        ent_bdr[k] = C.topo.boundary_flags(k);

    for (int s = 0; s < 4; ++s)
    {
        const int n = C.dims[s];
        C.dof_entity_dim[s].resize(n);
        C.dof_entity_id[s].resize(n);
        C.dof_boundary[s].resize(n);
        C.dof_is_pv[s].resize(n);
        C.dof_integral_weight[s].assign(n, 0.0);
        for (int d = 0; d < n; ++d)
        {
            C.dof_entity_dim[s][d] = st_[s].ent_dim[d];
            C.dof_entity_id[s][d] = st_[s].ent_id[d];
            C.dof_boundary[s][d] =
                ent_bdr[st_[s].ent_dim[d]][st_[s].ent_id[d]];
            C.dof_is_pv[s][d] = st_[s].kind[d] == DofKind::Pv;
            if (st_[s].kind[d] == DofKind::Pv)
                C.dof_integral_weight[s][d] = 1.0;
        }
        for (int k = 0; k < 4; ++k)
            C.dofs_on_entity[s][k] = st_[s].ents[k];
    }

    // constant-one representation: volume on each element PV dof
    C.l2_const_rep.assign(C.dims[kL2], 0.0);
    for (int T = 0; T < C.topo.counts[3]; ++T)
    {
        const int pv = st_[kL2].ents[3][T].front();
        C.l2_const_rep[pv] = C.topo.element_volume[T];
    }

    // coarse targets by projection
    for (int s = 0; s < 4; ++s)
    {
        const DenseMatrix& T = F.targets[s];
        DenseMatrix CT(C.dims[s], T.cols());
        for (int c = 0; c < T.cols(); ++c)
            CT.set_column(c, Pi[s].mult(T.column(c)));
        C.targets[s] = CT;
    }

    // coarse vector-nodal interpolation via the projector recursion
    {
        const int d0f = F.dims[kH1];
        const int d0c = C.dims[kH1];
        std::vector<std::tuple<int, int, double>> trip;
        for (int comp = 0; comp < 3; ++comp)
            for (int i = 0; i < F.dims[kH1]; ++i)
            {
                auto cc = P[kH1].row_cols(i);
                auto vv = P[kH1].row_values(i);
                for (std::size_t k = 0; k < cc.size(); ++k)
                    trip.emplace_back(comp * d0f + i, comp * d0c + cc[k], vv[k]);
            }
        const SparseMatrix P_vec =
            SparseMatrix::from_triplets(3 * d0f, 3 * d0c, trip);
        for (int j = 0; j < 2; ++j)
            C.pi_hat[j] = multiply(Pi[j + 1], multiply(F.pi_hat[j], P_vec));
    }

    // coarse local Gram matrices by entity-local Galerkin restriction
    for (int s = 0; s < 4; ++s)
        for (int k = s; k < 4; ++k)
        {
            auto& set = C.mass[s][k];
            set.dofs.resize(C.topo.counts[k]);
            set.mats.resize(C.topo.counts[k]);
            for (int X = 0; X < C.topo.counts[k]; ++X)
            {
                const std::vector<int> cls = DA.closure_dofs(s, k, X);
                const auto lmap = local_map(cls);
                const DenseMatrix M = local_mass(s, k, X, cls, lmap);

                std::vector<int> cdofs;
                for (const auto& [dim, id] : DA.closure_ents_for_space(s, k, X))
                    for (const int d : st_[s].ents[dim][id])
                        cdofs.push_back(d);
                DenseMatrix Sc(static_cast<int>(cls.size()),
                               static_cast<int>(cdofs.size()));
                for (std::size_t c = 0; c < cdofs.size(); ++c)
                    Sc.set_column(static_cast<int>(c),
                                  restrict_col(s, cdofs[c], lmap,
                                               static_cast<int>(cls.size())));
                set.dofs[X] = cdofs;
                set.mats[X] = mat_mul_tn(Sc, M.mult(Sc));
            }
        }
}

void Coarsener::run_checks(const CoarsenedLevel& out) const
{
    const double tol = opt_.exactness_tol;
    auto max_abs = [](const SparseMatrix& A) {
        double m = 0.0;
        for (const double v : A.values())
            m = std::max(m, std::abs(v));
        return m;
    };

    for (int s = 0; s < 4; ++s)
    {
        const SparseMatrix PiP = multiply(out.Pi[s], out.P[s]);
        const SparseMatrix E =
            add(PiP, SparseMatrix::identity(out.level.dims[s]), -1.0);
        if (max_abs(E) > tol)
            throw ExactnessViolation("coarse projector is not a right inverse");
    }
    for (int s = 0; s < 2; ++s)
    {
        const SparseMatrix DD =
            multiply(out.level.derivative[s + 1], out.level.derivative[s]);
        if (max_abs(DD) > tol)
            throw ExactnessViolation("coarse derivatives do not compose to zero");
    }
    for (int s = 0; s < 3; ++s)
    {
        const SparseMatrix Dop = F.derivative_op(s);
        const double scale = std::max(1.0, max_abs(Dop));
        const SparseMatrix commut =
            add(multiply(out.level.derivative[s], out.Pi[s]),
                multiply(out.Pi[s + 1], Dop), -1.0);
        if (max_abs(commut) > tol * scale)
            throw ExactnessViolation("coarse sequence does not commute");
        const SparseMatrix compat =
            add(multiply(Dop, out.P[s]),
                multiply(out.P[s + 1], out.level.derivative[s]), -1.0);
        if (max_abs(compat) > tol * scale)
            throw ExactnessViolation("prolongators are not derivative-compatible");
    }
}

CoarsenedLevel Coarsener::run()
{
    for (int s = 3; s >= 0; --s)
    {
        init_stage(s);
        for (int k = s + 1; k < 4 && s < 3; ++k)
            extend_stage(s, k);
    }

    CoarsenedLevel out;
    for (int s = 0; s < 4; ++s)
        out.P[s] = build_p(s);
    // the preimage rows of Pi_s reference Pi_{s+1}
    for (int s = 3; s >= 0; --s)
        out.Pi[s] = build_pi(s, out.P[s], s < 3 ? &out.Pi[s + 1] : nullptr);
    fill_metadata(out.level, out.P, out.Pi);

    if (opt_.run_checks)
        run_checks(out);
    return out;
}

} // namespace

CoarsenedLevel coarsen_sequence(const SequenceLevel& fine,
                                const AgglomeratedTopology& step,
                                const CoarsenOptions& opt)
{
    return Coarsener(fine, step, opt).run();
}

SparseMatrix rap_level(const SparseMatrix& A_fine, const SparseMatrix& P)
{
    return rap(A_fine, P);
}

} // namespace deramg
