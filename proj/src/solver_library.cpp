// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/solver_library.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace deramg
{

namespace
{

const std::set<std::string> kTypes = {"jacobi", "l1-sgs",  "hybrid", "vcycle",
                                      "pcg",    "direct", "aux-space"};

} // namespace

SolverLibrary SolverLibrary::parse(const std::string& json_text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(json_text);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ConfigError(std::string("solver config is not valid JSON: ") +
                          e.what());
    }
    DERAMG_REQUIRE(doc.is_object() && doc.contains("solvers") &&
                       doc["solvers"].is_object(),
                   ConfigError, "solver config needs a top-level 'solvers' object");

    SolverLibrary lib;
    for (const auto& [name, body] : doc["solvers"].items())
    {
        DERAMG_REQUIRE(body.is_object() && body.contains("type"), ConfigError,
                       "solver '" + name + "' needs a 'type'");
        Spec s;
        s.type = body["type"].get<std::string>();
        DERAMG_REQUIRE(kTypes.count(s.type), ConfigError,
                       "unknown solver type '" + s.type + "' in '" + name + "'");
        s.sweeps = body.value("sweeps", 2);
        s.damping = body.value("damping", 1.0);
        s.max_iterations = body.value("max_iterations", 1000);
        s.rel_tol = body.value("rel_tol", 1e-6);
        s.levels = body.value("levels", 0);
        s.smoother = body.value("smoother", "");
        s.coarse = body.value("coarse", "");
        s.preconditioner = body.value("preconditioner", "");
        lib.specs_[name] = s;
    }
    lib.validate();
    return lib;
}

SolverLibrary SolverLibrary::from_file(const std::string& path)
{
    std::ifstream in(path);
    DERAMG_REQUIRE(in.good(), ConfigError, "cannot open solver config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

SolverLibrary SolverLibrary::default_library(const std::string& name)
{
    SolverLibrary lib;
    Spec top;
    top.type = "pcg";
    top.preconditioner = "amge";
    top.rel_tol = 1e-6;
    top.max_iterations = 1000;
    lib.specs_[name] = top;

    Spec mg;
    mg.type = "vcycle";
    mg.smoother = "hybrid-sgs";
    mg.coarse = "coarse-aux-pcg";
    lib.specs_["amge"] = mg;

    Spec hyb;
    hyb.type = "hybrid";
    hyb.sweeps = 2;
    lib.specs_["hybrid-sgs"] = hyb;

    Spec cpcg;
    cpcg.type = "pcg";
    cpcg.preconditioner = "aux";
    cpcg.max_iterations = 5;
    cpcg.rel_tol = 0.0;
    lib.specs_["coarse-aux-pcg"] = cpcg;

    Spec aux;
    aux.type = "aux-space";
    aux.sweeps = 2;
    lib.specs_["aux"] = aux;

    lib.validate();
    return lib;
}

std::vector<std::string> SolverLibrary::names() const
{
    std::vector<std::string> out;
    for (const auto& [n, s] : specs_)
        out.push_back(n);
    return out;
}

const SolverLibrary::Spec& SolverLibrary::spec(const std::string& name) const
{
    const auto it = specs_.find(name);
    if (it == specs_.end())
        throw ConfigError("no solver named '" + name + "'");
    return it->second;
}

void SolverLibrary::validate() const
{
    // every reference resolves and the reference graph is acyclic
    for (const auto& [name, s] : specs_)
        for (const std::string& ref : {s.smoother, s.coarse, s.preconditioner})
            if (!ref.empty() && !specs_.count(ref))
                throw ConfigError("solver '" + name + "' references unknown '" +
                                  ref + "'");

    std::map<std::string, int> state; // 0 unseen, 1 open, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        if (state[n] == 1)
            throw ConfigError("solver reference cycle through '" + n + "'");
        if (state[n] == 2)
            return;
        state[n] = 1;
        const Spec& s = spec(n);
        for (const std::string& ref : {s.smoother, s.coarse, s.preconditioner})
            if (!ref.empty())
                visit(ref);
        state[n] = 2;
    };
    for (const auto& [name, s] : specs_)
        visit(name);
}

std::shared_ptr<const Smoother> SolverLibrary::build_smoother(
    const std::string& name, const Hierarchy& h, int level) const
{
    const Spec& s = spec(name);
    if (s.type == "jacobi")
        return std::make_shared<JacobiSmoother>(h.system(level), s.sweeps,
                                                s.damping);
    if (s.type == "l1-sgs")
        return std::make_shared<L1SgsSmoother>(h.system(level), s.sweeps);
    if (s.type == "hybrid")
        return std::make_shared<HybridSmoother>(h.system(level),
                                                h.kernel_transfer(level), s.sweeps);
    throw ConfigError("solver '" + name + "' of type '" + s.type +
                      "' cannot act as a smoother");
}

std::unique_ptr<LinOp> SolverLibrary::build_operator(const std::string& name,
                                                     const Hierarchy& h,
                                                     int level) const
{
    const Spec& s = spec(name);
    if (s.type == "jacobi" || s.type == "l1-sgs" || s.type == "hybrid")
        return std::make_unique<SmootherOperator>(build_smoother(name, h, level));
    if (s.type == "direct")
        return std::make_unique<DirectSolverOperator>(h.system(level));
    if (s.type == "aux-space")
        return std::make_unique<AuxSpacePreconditioner>(
            h.system(level), h.form(), h.nodal_interp(level),
            h.kernel_transfer(level), h.nodal_interp_prev(level),
            h.kernel_transfer_prev(level), s.sweeps);
    if (s.type == "pcg")
    {
        DERAMG_REQUIRE(!s.preconditioner.empty(), ConfigError,
                       "pcg solver '" + name + "' needs a preconditioner");
        auto prec = std::shared_ptr<LinOp>(
            build_operator(s.preconditioner, h, level));
        auto aop = std::make_shared<MatrixOperator>(h.system(level));
        return std::make_unique<PcgOperator>(aop, prec, s.rel_tol,
                                             s.max_iterations);
    }
    if (s.type == "vcycle")
    {
        DERAMG_REQUIRE(level == 0, ConfigError,
                       "vcycle solvers start from the finest level");
        const int depth =
            s.levels > 0 ? std::min(s.levels, h.n_levels()) : h.n_levels();
        DERAMG_REQUIRE(!s.smoother.empty() && !s.coarse.empty(), ConfigError,
                       "vcycle solver '" + name +
                           "' needs 'smoother' and 'coarse' references");
        std::vector<std::shared_ptr<const Smoother>> sm;
        for (int l = 0; l + 1 < depth; ++l)
            sm.push_back(build_smoother(s.smoother, h, l));
        auto coarse =
            std::shared_ptr<LinOp>(build_operator(s.coarse, h, depth - 1));
        return std::make_unique<VCyclePreconditioner>(h, std::move(sm),
                                                      std::move(coarse), depth);
    }
    throw ConfigError("unhandled solver type '" + s.type + "'");
}

SolveOutcome SolverLibrary::solve(const std::string& name, const Hierarchy& h,
                                  const Vector& b) const
{
    const Spec& s = spec(name);
    SolveOutcome out;
    if (s.type == "direct")
    {
        const DirectSolverOperator solver(h.system(0));
        out.x = solver.apply(b);
        out.converged = true;
        const Vector r = h.system(0).mult(out.x);
        double rn = 0.0, bn = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
        {
            rn += (r[i] - b[i]) * (r[i] - b[i]);
            bn += b[i] * b[i];
        }
        out.rel_residual = bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
        return out;
    }
    if (s.type == "pcg")
    {
        DERAMG_REQUIRE(!s.preconditioner.empty(), ConfigError,
                       "pcg solver '" + name + "' needs a preconditioner");
        const auto prec = build_operator(s.preconditioner, h, 0);
        const MatrixOperator A(h.system(0));
        const PcgResult r = pcg(A, *prec, b, s.rel_tol, s.max_iterations);
        out.x = r.x;
        out.iterations = r.iterations;
        out.converged = r.converged;
        out.rel_residual = r.residuals.empty() || r.residuals.front() == 0.0
                               ? 0.0
                               : r.residuals.back() / r.residuals.front();
        return out;
    }
    throw ConfigError("top-level solver '" + name + "' must be pcg or direct");
}

} // namespace deramg
