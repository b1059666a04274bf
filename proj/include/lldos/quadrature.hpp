#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace lldos {

// Gauss-Laguerre rule for the weight e^{-x} on [0,inf).  Weights are stored
// as logarithms: for n in the thousands the far nodes carry weights far
// below the double underflow threshold, yet the "barycentric" combination
// exp(logw + x) stays O(1) and is what the basis integrals actually use.
struct GaussLaguerreRule {
    int n = 0;
    std::vector<double> node;
    std::vector<double> logw;

    // sum_i w_i f(x_i)  ~  int_0^inf e^{-x} f(x) dx
    template <typename F>
    double apply(F&& f) const {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += std::exp(logw[i]) * f(node[i]);
        return acc;
    }
};

// Cached; building a rule is O(n^2), reuse is free.  Rules are built on
// first use; after that the cache is read-only and safe to share between
// threads (contract: warm the cache single-threaded before going parallel).
const GaussLaguerreRule& gauss_laguerre(int n);

// Gauss-Legendre rule on [-1,1].
struct GaussLegendreRule {
    int n = 0;
    std::vector<double> node;
    std::vector<double> weight;
};

const GaussLegendreRule& gauss_legendre(int n);

// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

} // namespace lldos
