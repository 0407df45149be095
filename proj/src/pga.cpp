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

#include "irsfd/convex.hpp"

namespace irsfd {

PgaResult pga_maximize(
    const std::function<double(const RVec&, RVec*)>& evaluate,
    const std::function<RVec(const RVec&)>& project,
    const RVec& x0, double step0, int max_iters, double tol) {
    PgaResult res;
    res.x = project(x0);
    RVec grad(res.x.size());
    res.value = evaluate(res.x, &grad);
    if (!std::isfinite(res.value)) {
        res.status = PgaStatus::kFailure;
        return res;
    }

    double step = step0;
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxBacktracks = 60;

    for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
        bool accepted = false;
        RVec cand;
        double f_cand = 0.0;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            cand = project(res.x + step * grad);
            const double dirv = grad.dot(cand - res.x);
            if (dirv <= 0.0) {
                step *= 0.5;
                continue;
            }
            f_cand = evaluate(cand, nullptr);
            if (std::isfinite(f_cand) && f_cand >= res.value + kArmijo * dirv) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.status = PgaStatus::kConverged;
            return res;
        }
        const double gain = f_cand - res.value;
        res.x = cand;
        res.value = evaluate(res.x, &grad);
        step *= 2.0;
        if (gain <= tol * (1.0 + std::abs(res.value))) {
            res.status = PgaStatus::kConverged;
            ++res.iterations;
            return res;
        }
    }
    res.status = PgaStatus::kMaxIters;
    return res;
}

}  // namespace irsfd
