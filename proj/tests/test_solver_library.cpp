// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deramg/solver_library.hpp"

using namespace deramg;

namespace
{

Hierarchy small_hierarchy(int form)
{
    const Mesh m = uniform_refine(generate_cube_mesh(1));
    HierarchyOptions opt;
    opt.levels = 2;
    return Hierarchy(m, form, Coefficient::constant(1.0, 1.0), opt);
}

} // namespace

TEST_CASE("config with pcg over vcycle converges on the 48-tet problem")
{
    const std::string cfgtext = R"({
      "solvers": {
        "main":   {"type": "pcg", "preconditioner": "mg",
                   "rel_tol": 1e-6, "max_iterations": 300},
        "mg":     {"type": "vcycle", "smoother": "hyb", "coarse": "exact"},
        "hyb":    {"type": "hybrid", "sweeps": 2},
        "exact":  {"type": "direct"}
      }
    })";
    const SolverLibrary lib = SolverLibrary::parse(cfgtext);
    CHECK(lib.has("main"));
    CHECK(lib.names().size() == 4);

    const Hierarchy h = small_hierarchy(kHdiv);
    const Vector b = h.constant_load();
    const SolveOutcome out = lib.solve("main", h, b);
    CHECK(out.converged);
    CHECK(out.iterations > 0);
    CHECK(out.rel_residual <= 1e-6);
}

TEST_CASE("cyclic references are rejected")
{
    const std::string cfgtext = R"({
      "solvers": {
        "a": {"type": "pcg", "preconditioner": "b"},
        "b": {"type": "pcg", "preconditioner": "a"}
      }
    })";
    CHECK_THROWS_AS(SolverLibrary::parse(cfgtext), ConfigError);
}

TEST_CASE("empty config gives clean lookup failures")
{
    const SolverLibrary lib = SolverLibrary::parse(R"({"solvers": {}})");
    CHECK(lib.names().empty());
    const Hierarchy h = small_hierarchy(kHdiv);
    CHECK_THROWS_AS(lib.solve("anything", h, h.constant_load()), ConfigError);
}

TEST_CASE("unknown type and dangling references are rejected")
{
    CHECK_THROWS_AS(SolverLibrary::parse(
                        R"({"solvers": {"x": {"type": "banana"}}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        SolverLibrary::parse(
            R"({"solvers": {"x": {"type": "pcg", "preconditioner": "nope"}}})"),
        ConfigError);
    CHECK_THROWS_AS(SolverLibrary::parse("not json at all"), ConfigError);
}

TEST_CASE("default library solves both forms")
{
    for (const int form : {int(kHcurl), int(kHdiv)})
    {
        const SolverLibrary lib = SolverLibrary::default_library();
        const Hierarchy h = small_hierarchy(form);
        const SolveOutcome out = lib.solve("default", h, h.constant_load());
        CHECK(out.converged);
    }
}

TEST_CASE("operators from every type can be built")
{
    const Hierarchy h = small_hierarchy(kHdiv);
    const std::string cfgtext = R"({
      "solvers": {
        "j":   {"type": "jacobi", "sweeps": 1, "damping": 0.7},
        "gs":  {"type": "l1-sgs", "sweeps": 1},
        "hyb": {"type": "hybrid"},
        "aux": {"type": "aux-space"},
        "ex":  {"type": "direct"},
        "mg":  {"type": "vcycle", "smoother": "gs", "coarse": "ex", "levels": 2},
        "k5":  {"type": "pcg", "preconditioner": "aux", "rel_tol": 0.0,
                "max_iterations": 5}
      }
    })";
    const SolverLibrary lib = SolverLibrary::parse(cfgtext);
    for (const std::string name : {"j", "gs", "hyb", "aux", "ex", "mg", "k5"})
    {
        const auto op = lib.build_operator(name, h, 0);
        REQUIRE(op);
        CHECK(op->size() == h.system(0).rows());
        const Vector r(op->size(), 1.0);
        const Vector y = op->apply(r);
        CHECK(static_cast<int>(y.size()) == op->size());
    }
    // a smoother reference must be a smoother type
    const std::string bad = R"({
      "solvers": {
        "mg": {"type": "vcycle", "smoother": "ex", "coarse": "ex"},
        "ex": {"type": "direct"}
      }
    })";
    const SolverLibrary blib = SolverLibrary::parse(bad);
    const Hierarchy h2 = small_hierarchy(kHcurl);
    CHECK_THROWS_AS(blib.build_operator("mg", h2, 0), ConfigError);
}
