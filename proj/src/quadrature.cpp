#include "lldos/quadrature.hpp"
#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "lldos/errors.hpp"

namespace lldos {

namespace {

// Laguerre value with a base-2 exponent carried separately so the recurrence
// never overflows: L_m(x) oscillates with amplitude ~e^{x/2} near the last
// roots, which exceeds double range long before n reaches 4096.
struct ScaledPair {
    double cur = 1.0;   // L_m
    double prev = 0.0;  // L_{m-1}
    long ex2 = 0;       // shared power-of-two exponent

    void renormalize() {
        const double a = std::fabs(cur), b = std::fabs(prev);
        const double m = a > b ? a : b;
        if (m > 0x1p500) {
            cur *= 0x1p-500;
            prev *= 0x1p-500;
            ex2 += 500;
        } else if (m > 0.0 && m < 0x1p-500) {
            cur *= 0x1p500;
            prev *= 0x1p500;
            ex2 -= 500;
        }
    }
};

// Run the three-term recurrence up to degree n at point x.
ScaledPair laguerre_scaled(int n, double x) {
    ScaledPair s;
    if (n == 0) return s;
    s.prev = 1.0;
    s.cur = 1.0 - x;
    for (int m = 1; m < n; ++m) {
        const double next = ((2.0 * m + 1.0 - x) * s.cur - m * s.prev) / (m + 1.0);
        s.prev = s.cur;
        s.cur = next;
        s.renormalize();
    }
    return s;
}

std::unique_ptr<GaussLaguerreRule> build_gauss_laguerre(int n) {
    auto rule = std::make_unique<GaussLaguerreRule>();
    rule->n = n;
    rule->node.resize(n);
    rule->logw.resize(n);

    // Golub-Welsch nodes: eigenvalues of the Jacobi matrix (values only, the
    // eigenvector route would underflow for far nodes), then Newton polish.
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + 1.0;
    for (int i = 0; i + 1 < n; ++i) sub(i) = i + 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NonconvergenceError("gauss_laguerre: Jacobi eigenvalues failed at n=" +
                                  std::to_string(n));

    for (int i = 0; i < n; ++i) {
        double z = es.eigenvalues()(i);
        double last_step = 0.0;
        bool ok = false;
        for (int iter = 0; iter < 20; ++iter) {
            ScaledPair s = laguerre_scaled(n, z);
            // x L_n'(x) = n (L_n - L_{n-1})
            const double deriv = n * (s.cur - s.prev) / z;
            const double step = s.cur / deriv;
            z -= step;
            last_step = std::fabs(step);
            if (last_step <= 1e-14 * (1.0 + z)) {
                ok = true;
                break;
            }
        }
        // Newton limit-cycles at the ulp level are fine; only a genuinely
        // unconverged root is an error.
        if (!ok && last_step > 1e-10 * (1.0 + z))
            throw NonconvergenceError("gauss_laguerre: Newton stalled at n=" + std::to_string(n));
        rule->node[i] = z;

        // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2)
        ScaledPair s = laguerre_scaled(n + 1, z);
        const double log_l = std::log(std::fabs(s.cur)) + s.ex2 * M_LN2;
        rule->logw[i] = std::log(z) - 2.0 * std::log(n + 1.0) - 2.0 * log_l;
    }
    return rule;
}

std::unique_ptr<GaussLegendreRule> build_gauss_legendre(int n) {
    auto rule = std::make_unique<GaussLegendreRule>();
    rule->n = n;
    rule->node.resize(n);
    rule->weight.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / pp;
            z -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        rule->node[i] = -z;
        rule->node[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule->weight[i] = w;
        rule->weight[n - 1 - i] = w;
    }
    return rule;
}

template <typename Rule>
const Rule& cached(int n, std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mu,
                   std::unique_ptr<Rule> (*builder)(int)) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, builder(n)).first;
    return *it->second;
}

} // namespace

const GaussLaguerreRule& gauss_laguerre(int n) {
    if (n < 1 || n > 16384) throw DomainError("gauss_laguerre: order out of range");
    static std::map<int, std::unique_ptr<GaussLaguerreRule>> cache;
    static std::mutex mu;
    return cached(n, cache, mu, &build_gauss_laguerre);
}

const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1 || n > 8192) throw DomainError("gauss_legendre: order out of range");
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    static std::mutex mu;
    return cached(n, cache, mu, &build_gauss_legendre);
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw QuadratureError("adaptive_simpson: max depth reached");
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace lldos
