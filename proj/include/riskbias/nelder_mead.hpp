#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace riskbias {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Downhill simplex with standard coefficients (reflect 1, expand 2,
// contract 0.5, shrink 0.5). Stops when the simplex value spread falls under
// tol or the iteration cap is hit.
template <class Fn>
NelderMeadResult nelder_mead(Fn&& fn, std::vector<double> start,
                             double initial_step = 0.25, double tol = 1e-10,
                             int max_iter = 500) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> pts(dim + 1, start);
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i < dim; ++i)
        pts[i + 1][i] += initial_step * (std::fabs(start[i]) > 1.0 ? std::fabs(start[i]) : 1.0);
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = fn(pts[i]);

    NelderMeadResult result;
    std::vector<double> centroid(dim), trial(dim);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

        result.iterations = iter + 1;
        if (std::fabs(vals[worst] - vals[best]) <=
            tol * (1.0 + std::fabs(vals[best]) + std::fabs(vals[worst]))) {
            result.converged = true;
            result.x = pts[best];
            result.value = vals[best];
            return result;
        }

        for (std::size_t d = 0; d < dim; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i <= dim; ++i)
                if (i != worst) s += pts[i][d];
            centroid[d] = s / static_cast<double>(dim);
        }

        auto blend = [&](double coef) {
            for (std::size_t d = 0; d < dim; ++d)
                trial[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return fn(trial);
        };

        const double reflected = blend(-1.0);
        if (reflected < vals[order[0]]) {
            const std::vector<double> refl_pt = trial;
            const double expanded = blend(-2.0);
            if (expanded < reflected) {
                pts[worst] = trial;
                vals[worst] = expanded;
            } else {
                pts[worst] = refl_pt;
                vals[worst] = reflected;
            }
        } else if (reflected < vals[second]) {
            pts[worst] = trial;
            vals[worst] = reflected;
        } else {
            const double contracted = blend(0.5);
            if (contracted < vals[worst]) {
                pts[worst] = trial;
                vals[worst] = contracted;
            } else {
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < dim; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    vals[i] = fn(pts[i]);
                }
            }
        }
    }

    const std::size_t best = static_cast<std::size_t>(
        std::min_element(vals.begin(), vals.end()) - vals.begin());
    result.x = pts[best];
    result.value = vals[best];
    result.converged = false;
    return result;
}

} // namespace riskbias
