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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <Eigen/Eigenvalues>

#include "irsfd/convex.hpp"

namespace irsfd {

namespace {

bool in_exp_cone(double x, double y, double z) {
    if (y > 0.0 && y * std::exp(x / y) <= z) {
        return true;
    }
    return y == 0.0 && x <= 0.0 && z >= 0.0;
}

bool in_exp_dual_cone(double u, double v, double w) {
    if (u < 0.0 && -u * std::exp(v / u) <= std::exp(1.0) * w) {
        return true;
    }
    return u == 0.0 && v >= 0.0 && w >= 0.0;
}

// Squared distance from p to the graph point (a y, y, y e^a) with the
// y-optimal choice for this slope; fills the candidate when closer.
double graph_candidate(const Vec3& p, double alpha, double best, Vec3* out) {
    const double ea = std::exp(alpha);
    const double denom = alpha * alpha + 1.0 + ea * ea;
    if (!std::isfinite(denom)) {
        return best;
    }
    const double y = std::max(0.0, (alpha * p(0) + p(1) + p(2) * ea) / denom);
    const Vec3 cand(alpha * y, y, y * ea);
    const double dist = (cand - p).squaredNorm();
    if (dist < best) {
        *out = cand;
        return dist;
    }
    return best;
}

}  // namespace

Vec3 project_exp_cone(const Vec3& p) {
    const double r = p(0);
    const double s = p(1);
    const double t = p(2);
    if (in_exp_cone(r, s, t)) {
        return p;
    }
    if (in_exp_dual_cone(-r, -s, -t)) {
        return Vec3::Zero();
    }
    if (r <= 0.0 && s <= 0.0) {
        return Vec3(r, 0.0, std::max(t, 0.0));
    }

    // The projection of an exterior point sits on the cone boundary: either
    // the graph {(a y, y, y e^a) : y > 0} or the ray {(x, 0, z) : x <= 0,
    // z >= 0}. Scan slopes, refine the best by golden section, and compare
    // against the closed-form ray candidate.
    Vec3 best_pt(std::min(r, 0.0), 0.0, std::max(t, 0.0));
    double best = (best_pt - p).squaredNorm();

    const double lo = -60.0;
    const double hi = 60.0;
    const double step = 0.25;
    double best_alpha = lo;
    for (double a = lo; a <= hi + 1e-12; a += step) {
        const double prev = best;
        best = graph_candidate(p, a, best, &best_pt);
        if (best < prev) {
            best_alpha = a;
        }
    }

    double a_lo = best_alpha - step;
    double a_hi = best_alpha + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = a_hi - gr * (a_hi - a_lo);
    double x2 = a_lo + gr * (a_hi - a_lo);
    Vec3 scratch;
    auto dist_at = [&](double a) {
        scratch = best_pt;
        double d = graph_candidate(p, a, std::numeric_limits<double>::infinity(), &scratch);
        return std::make_pair(d, scratch);
    };
    auto [f1, p1] = dist_at(x1);
    auto [f2, p2] = dist_at(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            a_hi = x2;
            x2 = x1;
            f2 = f1;
            p2 = p1;
            x1 = a_hi - gr * (a_hi - a_lo);
            std::tie(f1, p1) = dist_at(x1);
        } else {
            a_lo = x1;
            x1 = x2;
            f1 = f2;
            p1 = p2;
            x2 = a_lo + gr * (a_hi - a_lo);
            std::tie(f2, p2) = dist_at(x2);
        }
    }
    if (f1 < best) {
        best = f1;
        best_pt = p1;
    }
    if (f2 < best) {
        best = f2;
        best_pt = p2;
    }
    return best_pt;
}

RVec project_cone(const RVec& z, ConeType type) {
    switch (type) {
        case ConeType::kZero:
            return RVec::Zero(z.size());
        case ConeType::kNonneg:
            return z.cwiseMax(0.0);
        case ConeType::kSoc: {
            if (z.size() == 1) {
                RVec out(1);
                out(0) = std::max(z(0), 0.0);
                return out;
            }
            const double t = z(0);
            const double un = z.tail(z.size() - 1).norm();
            if (un <= t) {
                return z;
            }
            if (un <= -t) {
                return RVec::Zero(z.size());
            }
            RVec out(z.size());
            const double scale = 0.5 * (1.0 + t / un);
            out(0) = 0.5 * (t + un);
            out.tail(z.size() - 1) = scale * z.tail(z.size() - 1);
            return out;
        }
        case ConeType::kExp: {
            if (z.size() != 3) {
                throw std::invalid_argument("project_cone: exponential block must have size 3");
            }
            const Vec3 q = project_exp_cone(Vec3(z(0), z(1), z(2)));
            RVec out(3);
            out << q(0), q(1), q(2);
            return out;
        }
    }
    throw std::logic_error("project_cone: unknown cone type");
}

CMat project_psd(const CMat& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("project_psd: matrix must be square");
    }
    const double asym = (a - a.adjoint()).norm();
    if (asym > 1e-8 * std::max(1.0, a.norm())) {
        throw std::invalid_argument("project_psd: matrix is not Hermitian");
    }
    const CMat h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(h);
    RVec vals = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

void project_trace_budget(std::vector<CMat>* w, double budget) {
    if (budget < 0.0) {
        throw std::invalid_argument("project_trace_budget: budget must be nonnegative");
    }
    double total = 0.0;
    for (const CMat& wk : *w) {
        total += wk.trace().real();
    }
    if (total > budget && total > 0.0) {
        const double scale = budget / total;
        for (CMat& wk : *w) {
            wk *= scale;
        }
    }
}

CVec project_unit_disk(const CVec& v) {
    CVec out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double mag = std::abs(out[i]);
        if (mag > 1.0) {
            out[i] /= mag;
        }
    }
    return out;
}

}  // namespace irsfd
