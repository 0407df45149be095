// irsfd  simulation and optimization toolkit for IRS-assisted full-duplex links
// Copyright (C) 2026 irsfd contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "irsfd/convex.hpp"

using namespace irsfd;

TEST_CASE("unit disk projection clamps magnitudes only") {
    CVec v(3);
    v << cplx(0.5, 0.5), cplx(3.0, 4.0), cplx(-1.0, 0.0);
    const CVec p = project_unit_disk(v);
    CHECK(std::abs(p(0) - v(0)) < 1e-15);
    CHECK(std::abs(p(1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::arg(p(1)) == doctest::Approx(std::arg(v(1))).epsilon(1e-12));
    CHECK(std::abs(p(2) - v(2)) < 1e-15);
}

TEST_CASE("psd projection clamps negative eigenvalues") {
    CMat a(2, 2);
    a << cplx(1.0, 0.0), cplx(0.0, 2.0), cplx(0.0, -2.0), cplx(1.0, 0.0);
    const CMat p = project_psd(a);
    Eigen::SelfAdjointEigenSolver<CMat> eig(p);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
    // Eigenvalues of a are 1 +- 2; the negative one is removed, the positive
    // one kept with its eigenvector.
    CHECK(eig.eigenvalues().maxCoeff() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK((project_psd(p) - p).norm() < 1e-10);

    CMat psd(2, 2);
    psd << cplx(2.0, 0.0), cplx(0.5, 0.1), cplx(0.5, -0.1), cplx(1.0, 0.0);
    CHECK((project_psd(psd) - psd).norm() < 1e-10);

    CMat bad(2, 2);
    bad << cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0);
    CHECK_THROWS_AS(project_psd(bad), std::invalid_argument);
}

TEST_CASE("trace budget projection rescales only when over budget") {
    std::vector<CMat> w(2);
    w[0] = CMat::Identity(2, 2) * cplx(2.0, 0.0);
    w[1] = CMat::Identity(2, 2) * cplx(1.0, 0.0);
    std::vector<CMat> keep = w;
    project_trace_budget(&keep, 10.0);
    CHECK((keep[0] - w[0]).norm() == 0.0);
    project_trace_budget(&w, 3.0);
    double total = 0.0;
    for (const auto& wk : w) total += wk.trace().real();
    CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
    CHECK((w[0] - 0.5 * CMat::Identity(2, 2) * cplx(2.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("second-order cone projection closed form") {
    RVec z(3);
    z << 5.0, 3.0, 4.0;
    CHECK((project_cone(z, ConeType::kSoc) - z).norm() == 0.0);
    z << -6.0, 3.0, 4.0;
    CHECK(project_cone(z, ConeType::kSoc).norm() == 0.0);
    z << 0.0, 3.0, 4.0;
    const RVec p = project_cone(z, ConeType::kSoc);
    CHECK(p(0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(p.tail(2).norm() == doctest::Approx(2.5).epsilon(1e-12));
    // Projection is idempotent and the result is in the cone.
    CHECK((project_cone(p, ConeType::kSoc) - p).norm() < 1e-12);
}

namespace {

bool exp_cone_member(const Vec3& q, double tol) {
    if (q(1) > 0.0) {
        return q(1) * std::exp(q(0) / q(1)) <= q(2) + tol;
    }
    return q(1) >= -tol && q(0) <= tol && q(2) >= -tol;
}

}  // namespace

TEST_CASE("exponential cone projection against a dense grid oracle") {
    const std::vector<Vec3> points = {
        {1.0, 1.0, 1.0},   {2.0, 0.5, 1.0},  {-1.0, -1.0, 0.5}, {0.3, 0.2, -0.4},
        {-2.0, 1.0, -1.0}, {4.0, 0.1, 2.0},  {0.0, 0.0, -1.0},  {1.5, -0.5, 3.0},
        {-0.2, 0.4, 0.1},  {3.0, 2.0, 10.0},
    };
    for (const Vec3& p : points) {
        const Vec3 q = project_exp_cone(p);
        CHECK(exp_cone_member(q, 1e-9));
        CHECK((project_exp_cone(q) - q).norm() < 1e-8);
        const double d = (q - p).norm();

        // No grid point of the cone may be meaningfully closer.
        double best = d;
        for (double alpha = -8.0; alpha <= 8.0; alpha += 0.004) {
            const double ea = std::exp(alpha);
            const double y =
                std::max(0.0, (alpha * p(0) + p(1) + p(2) * ea) / (alpha * alpha + 1.0 + ea * ea));
            best = std::min(best, (Vec3(alpha * y, y, y * ea) - p).norm());
        }
        for (double x = -8.0; x <= 0.0; x += 0.004) {
            best = std::min(best, (Vec3(x, 0.0, std::max(p(2), 0.0)) - p).norm());
        }
        CHECK(d <= best + 1e-6);
    }
}

TEST_CASE("exponential cone members and polar points are fixed") {
    const Vec3 inside(0.0, 1.0, 2.0);  // 1*e^0 = 1 <= 2
    CHECK((project_exp_cone(inside) - inside).norm() == 0.0);
    const Vec3 boundary(1.0, 1.0, std::exp(1.0));
    CHECK((project_exp_cone(boundary) - boundary).norm() < 1e-9);
    // Interior of the polar cone projects to the origin.
    const Vec3 polar(1.0, -5.0, -1.0);
    CHECK(project_exp_cone(polar).norm() == 0.0);
}

TEST_CASE("projected gradient ascent reproduces water filling") {
    const RVec floors = (RVec(4) << 0.1, 0.25, 0.5, 1.0).finished();
    const double budget = 1.0;

    auto evaluate = [&](const RVec& x, RVec* grad) {
        double f = 0.0;
        for (int i = 0; i < 4; ++i) {
            f += std::log(floors(i) + x(i));
            if (grad != nullptr) {
                (*grad)(i) = 1.0 / (floors(i) + x(i));
            }
        }
        return f;
    };
    auto project = [&](const RVec& x) {
        RVec p = x.cwiseMax(0.0);
        if (p.sum() <= budget) {
            return p;
        }
        // Euclidean projection onto the simplex with total mass = budget.
        std::vector<double> u(x.data(), x.data() + x.size());
        std::sort(u.begin(), u.end(), std::greater<double>());
        double cssv = 0.0;
        double theta = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            cssv += u[i];
            const double t = (cssv - budget) / static_cast<double>(i + 1);
            if (i + 1 == u.size() || u[i + 1] <= t) {
                theta = t;
                break;
            }
        }
        return RVec((x.array() - theta).max(0.0));
    };

    const PgaResult res = pga_maximize(evaluate, project, RVec::Zero(4), 1.0, 5000, 1e-13);
    CHECK(res.status != PgaStatus::kFailure);

    // Water filling: x_i = (mu - floor_i)_+ with the budget binding.
    double lo = 0.0;
    double hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mu = 0.5 * (lo + hi);
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += std::max(0.0, mu - floors(i));
        (s > budget ? hi : lo) = mu;
    }
    const double mu = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        CHECK(res.x(i) == doctest::Approx(std::max(0.0, mu - floors(i))).epsilon(5e-4));
    }
}

TEST_CASE("pga rejects non-finite objectives") {
    auto evaluate = [](const RVec& x, RVec* grad) {
        if (grad != nullptr) grad->setZero();
        return std::numeric_limits<double>::quiet_NaN();
    };
    auto project = [](const RVec& x) { return x; };
    const PgaResult res = pga_maximize(evaluate, project, RVec::Zero(2));
    CHECK(res.status == PgaStatus::kFailure);
}

TEST_CASE("conic solver solves a box linear program") {
    ConicProgram prog;
    const int x = prog.add_var("x");
    prog.add_objective(x, -1.0);  // maximize x
    prog.add_le({{x, 1.0}}, 1.0, "box");
    const SolveResult res = solve_conic(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.x(x) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(res.primal_residual <= 1e-7);
    CHECK(res.dual_residual <= 1e-7);
    CHECK(res.gap <= 1e-7);
}

TEST_CASE("conic solver handles badly scaled data") {
    ConicProgram prog;
    const int x = prog.add_var("x");
    prog.add_objective(x, -1e3);
    prog.add_le({{x, 1e-6}}, 3e-6, "box");
    const SolveResult res = solve_conic(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.x(x) == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("conic solver finds the euclidean norm") {
    // minimize t subject to ||(3, 4)|| <= t.
    ConicProgram prog;
    const int t = prog.add_var("t");
    prog.add_objective(t, 1.0);
    prog.begin_block(ConeType::kSoc, 3, "norm");
    prog.add_entry(0, t, -1.0);
    prog.set_rhs(1, 3.0);
    prog.set_rhs(2, 4.0);
    const SolveResult res = solve_conic(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.x(t) == doctest::Approx(5.0).epsilon(1e-5));
}

TEST_CASE("conic solver maximizes log through the exponential cone") {
    // maximize u subject to e^u <= x, x <= e; optimum u = 1.
    ConicProgram prog;
    const int u = prog.add_var("u");
    const int x = prog.add_var("x");
    prog.add_objective(u, -1.0);
    prog.begin_block(ConeType::kExp, 3, "log");
    prog.add_entry(0, u, -1.0);
    prog.set_rhs(1, 1.0);
    prog.add_entry(2, x, -1.0);
    prog.add_le({{x, 1.0}}, std::exp(1.0), "cap");
    const SolveResult res = solve_conic(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.x(u) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(res.x(x) == doctest::Approx(std::exp(1.0)).epsilon(1e-4));
}

TEST_CASE("conic solver solves a rotated cone hyperbolic constraint") {
    // minimize beta subject to 2^2 <= beta * 1, written as
    // ||(4, beta - 1)|| <= beta + 1; optimum beta = 4.
    ConicProgram prog;
    const int beta = prog.add_var("beta");
    prog.add_objective(beta, 1.0);
    prog.begin_block(ConeType::kSoc, 3, "hyper");
    prog.add_entry(0, beta, -1.0);
    prog.set_rhs(0, 1.0);
    prog.set_rhs(1, 4.0);
    prog.add_entry(2, beta, -1.0);
    prog.set_rhs(2, -1.0);
    const SolveResult res = solve_conic(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.x(beta) == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("conic solver detects infeasibility") {
    ConicProgram prog;
    const int x = prog.add_var("x");
    prog.add_objective(x, 1.0);
    prog.add_le({{x, 1.0}}, 1.0, "upper");
    prog.add_le({{x, -1.0}}, -3.0, "lower");
    const SolveResult res = solve_conic(prog);
    CHECK(res.status == SolveStatus::kInfeasible);
}

TEST_CASE("conic solver honors equality blocks") {
    // minimize x + 2y subject to x + y = 1, x >= 0, y >= 0: optimum (1, 0).
    ConicProgram prog;
    const int x = prog.add_var("x");
    const int y = prog.add_var("y");
    prog.add_objective(x, 1.0);
    prog.add_objective(y, 2.0);
    prog.add_eq({{x, 1.0}, {y, 1.0}}, 1.0, "sum");
    prog.add_le({{x, -1.0}}, 0.0, "xpos");
    prog.add_le({{y, -1.0}}, 0.0, "ypos");
    const SolveResult res = solve_conic(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(res.x(x) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("conic solver is deterministic") {
    auto build = [] {
        ConicProgram prog;
        const int t = prog.add_var();
        const int z = prog.add_var();
        prog.add_objective(t, 1.0);
        prog.add_objective(z, 0.3);
        prog.begin_block(ConeType::kSoc, 3, "norm");
        prog.add_entry(0, t, -1.0);
        prog.add_entry(1, z, 0.5);
        prog.set_rhs(1, 3.0);
        prog.set_rhs(2, 4.0);
        prog.add_le({{z, -1.0}}, 2.0, "zbound");
        return prog;
    };
    const SolveResult a = solve_conic(build());
    const SolveResult b = solve_conic(build());
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK((a.x - b.x).norm() == 0.0);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("constraint group tags are countable") {
    ConicProgram prog;
    const int x = prog.add_var();
    for (int i = 0; i < 5; ++i) {
        prog.begin_block(ConeType::kSoc, 3, "modulus");
        prog.add_entry(1, x, 1.0);
        prog.set_rhs(0, 1.0);
    }
    prog.add_le({{x, 1.0}}, 1.0, "power");
    CHECK(prog.count_blocks("modulus") == 5);
    CHECK(prog.rows_in_blocks("modulus") == 15);
    CHECK(prog.count_blocks("power") == 1);
    CHECK(prog.count_blocks("absent") == 0);
}
