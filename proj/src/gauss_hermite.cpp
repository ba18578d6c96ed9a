#include "mnx/gauss_hermite.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mnx {

namespace {

// Newton iteration on the physicists' Hermite polynomial H_n; standard
// Numerical-Recipes-style construction with symmetric roots.
GaussHermite compute(int n) {
    GaussHermite gh;
    gh.nodes.assign(n, 0.0);
    std::vector<double> raw_w(n, 0.0);
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * gh.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * gh.nodes[1];
        else
            z = 2.0 * z - gh.nodes[i - 2];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
        gh.nodes[i] = z;
        gh.nodes[n - 1 - i] = -z;
        raw_w[i] = 2.0 / (pp * pp);
        raw_w[n - 1 - i] = raw_w[i];
    }
    // Nodes ascend; normalize weights to sum exactly to the computed total so
    // that integrating f == 1 returns 1 at machine precision.
    for (int i = 0; i < n / 2; ++i) std::swap(gh.nodes[i], gh.nodes[n - 1 - i]);
    double total = 0.0;
    for (double w : raw_w) total += w;
    gh.weights.resize(n);
    for (int i = 0; i < n; ++i) gh.weights[i] = raw_w[i] / total;
    return gh;
}

} // namespace

const GaussHermite& gauss_hermite(int order) {
    if (order < 1 || order > 256) throw std::invalid_argument("gauss_hermite: bad order");
    static std::map<int, GaussHermite> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute(order)).first;
    return it->second;
}

} // namespace mnx
