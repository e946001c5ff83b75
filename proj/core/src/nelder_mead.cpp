#include "tessera/arima/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tessera::arima {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, const NelderMeadOptions& opt) {
    const int d = static_cast<int>(start.size());
    NelderMeadResult result;
    if (d == 0) {
        result.x = start;
        result.value = f(start);
        result.converged = true;
        return result;
    }

    std::vector<Eigen::VectorXd> simplex;
    simplex.push_back(start);
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd v = start;
        v(i) += std::max(std::abs(v(i)), 1.0) * opt.initial_step;
        simplex.push_back(v);
    }
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = f(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t lo = order.front();
        const std::size_t hi = order.back();
        const std::size_t second_hi = order[order.size() - 2];

        result.iterations = iter;
        if (std::abs(values[hi] - values[lo]) <=
            opt.tolerance * (std::abs(values[lo]) + opt.tolerance)) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i : order)
            if (i != hi) centroid += simplex[i];
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd reflected =
            centroid + opt.reflection * (centroid - simplex[hi]);
        const double f_reflected = f(reflected);

        if (f_reflected < values[lo]) {
            const Eigen::VectorXd expanded =
                centroid + opt.expansion * (reflected - centroid);
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                simplex[hi] = expanded;
                values[hi] = f_expanded;
            } else {
                simplex[hi] = reflected;
                values[hi] = f_reflected;
            }
        } else if (f_reflected < values[second_hi]) {
            simplex[hi] = reflected;
            values[hi] = f_reflected;
        } else {
            const Eigen::VectorXd contracted =
                centroid + opt.contraction * (simplex[hi] - centroid);
            const double f_contracted = f(contracted);
            if (f_contracted < values[hi]) {
                simplex[hi] = contracted;
                values[hi] = f_contracted;
            } else {
                for (std::size_t i : order) {
                    if (i == lo) continue;
                    simplex[i] = simplex[lo] + opt.shrink * (simplex[i] - simplex[lo]);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        if (values[i] < values[best]) best = i;
    result.x = simplex[best];
    result.value = values[best];
    return result;
}

}  // namespace tessera::arima
