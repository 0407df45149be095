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
//
// Convex building blocks: a conic program representation with a first-order
// solver behind it, matrix projections, and a projected gradient ascent
// driver. Complex quantities enter the conic layer pre-expanded into real
// and imaginary parts.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "irsfd/common.hpp"

namespace irsfd {

// Cone of one constraint block, in rows of A x + s = b.
enum class ConeType {
    kZero,     // s = 0 (equality rows)
    kNonneg,   // s >= 0 elementwise
    kSoc,      // s = (t, u): ||u|| <= t
    kExp,      // s = (x, y, z): y > 0, y e^{x/y} <= z (closure)
};

struct ConeBlock {
    ConeType type = ConeType::kZero;
    int size = 0;
    std::string tag;  // constraint-group label for assembly introspection
};

// Sparse triplet form of the constraint matrix.
struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

// Conic program in the standard form
//   minimize    c^T x
//   subject to  A x + s = b,  s in K,
// with K a product of the blocks below, in row order.
class ConicProgram {
  public:
    // Adds a scalar variable, returning its column index.
    int add_var(const std::string& name = "");
    // Adds n contiguous variables, returning the first index.
    int add_vars(int n, const std::string& name = "");

    int num_vars() const { return num_vars_; }
    int num_rows() const { return num_rows_; }

    // Objective coefficient is additive across calls.
    void add_objective(int var, double coeff);

    // Begins a constraint block; rows are appended through add_entry /
    // set_rhs using indices [0, size) local to the block.
    void begin_block(ConeType type, int size, const std::string& tag);
    void add_entry(int local_row, int var, double coeff);
    void set_rhs(int local_row, double value);

    // Convenience block shapes.
    void add_eq(const std::vector<std::pair<int, double>>& terms, double rhs,
                const std::string& tag);
    // sum coeff_i x_i <= rhs
    void add_le(const std::vector<std::pair<int, double>>& terms, double rhs,
                const std::string& tag);

    const std::vector<ConeBlock>& blocks() const { return blocks_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }
    RVec rhs_vector() const;
    RVec objective_vector() const;

    int count_blocks(const std::string& tag) const;
    int rows_in_blocks(const std::string& tag) const;

  private:
    int num_vars_ = 0;
    int num_rows_ = 0;
    int block_base_ = -1;
    std::vector<ConeBlock> blocks_;
    std::vector<Triplet> triplets_;
    std::vector<double> b_store_;
    std::vector<double> c_store_;
};

enum class SolveStatus {
    kOptimal,
    kInfeasible,
    kNumericalFailure,
};

struct SolveResult {
    SolveStatus status = SolveStatus::kNumericalFailure;
    RVec x;
    double objective = 0.0;
    int iterations = 0;
    // KKT residuals of the returned iterate, each relative to the largest
    // norm among the terms it balances (so well-posed across data scales).
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    std::string message;
};

struct SolverSettings {
    int max_iters = 50000;
    double tol = 1e-8;
    int check_interval = 25;
    int anderson_memory = 10;
    bool verbose = false;
};

// Minimizes c^T x subject to A x + s = b, s in K. Deterministic for a fixed
// program and settings.
SolveResult solve_conic(const ConicProgram& prog, const SolverSettings& settings = {});

// Projection of z onto cone K (primal), one block.
RVec project_cone(const RVec& z, ConeType type);

// Euclidean projection onto the exponential cone closure
// {(x, y, z): y > 0, y e^{x/y} <= z} u {(x, 0, z): x <= 0, z >= 0}.
Vec3 project_exp_cone(const Vec3& p);

// Nearest Hermitian PSD matrix (eigenvalue clamp). Throws when the input is
// not Hermitian within 1e-8 relative tolerance.
CMat project_psd(const CMat& a);

// Scales the set of PSD matrices so the trace sum meets the budget when it
// is exceeded; leaves them untouched otherwise.
void project_trace_budget(std::vector<CMat>* w, double budget);

// Complex unit-disk projection, elementwise.
CVec project_unit_disk(const CVec& v);

enum class PgaStatus {
    kConverged,
    kMaxIters,
    kFailure,
};

struct PgaResult {
    PgaStatus status = PgaStatus::kFailure;
    RVec x;
    double value = 0.0;
    int iterations = 0;
};

// Maximizes a smooth function over a convex set by projected gradient ascent
// with Armijo backtracking. evaluate fills *grad when non-null and returns
// the objective; project maps any point into the feasible set. Accepted
// iterates are monotone in the objective.
PgaResult pga_maximize(
    const std::function<double(const RVec&, RVec*)>& evaluate,
    const std::function<RVec(const RVec&)>& project,
    const RVec& x0, double step0 = 1.0, int max_iters = 500, double tol = 1e-9);

}  // namespace irsfd
