#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mnx {

// Gauss-Hermite rule for int f(x) exp(-x^2) dx (physicists' weight).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights; // normalized so that sum(weights) == 1:
                                 // int f(z) phi(z; 0, x) dz ~= sum_i w_i f(sqrt(2x) xi_i)
};

const GaussHermite& gauss_hermite(int order);

// int f(z) phi(z; 0, variance) dz.
template <typename F>
double gh_gaussian_integral(const F& f, double variance, int order = 64) {
    const GaussHermite& gh = gauss_hermite(order);
    const double scale = std::sqrt(2.0 * variance);
    double sum = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        sum += gh.weights[i] * f(scale * gh.nodes[i]);
    return sum;
}

} // namespace mnx
