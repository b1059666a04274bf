#include "lldos/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>

#include "lldos/errors.hpp"
#include "lldos/quadrature.hpp"

namespace lldos::specfun {

namespace {

// L^{(k)}_m(xi) for k >= 0 by the degree recurrence.
double laguerre_upper(int m, int k, double xi) {
    if (m == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + k - xi;
    for (int j = 1; j < m; ++j) {
        const double next = ((2.0 * j + k + 1.0 - xi) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double falling_factorial_ratio(int ell, int m) {
    // (ell-m)!/ell!
    double r = 1.0;
    for (int j = ell - m + 1; j <= ell; ++j) r /= j;
    return r;
}

} // namespace

double laguerre(int ell, int k, double xi) {
    if (ell < 0) throw DomainError("laguerre: ell must be >= 0");
    if (k < -ell) throw DomainError("laguerre: superscript below -ell");
    if (xi < 0.0) throw DomainError("laguerre: xi must be >= 0");
    if (k >= 0) return laguerre_upper(ell, k, xi);
    const int m = -k;
    return std::pow(-xi, m) * falling_factorial_ratio(ell, m) * laguerre_upper(ell - m, m, xi);
}

double legendre(int ell, double x) {
    if (ell < 0) throw DomainError("legendre: ell must be >= 0");
    if (ell == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int m = 1; m < ell; ++m) {
        const double next = ((2.0 * m + 1.0) * x * cur - m * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double bessel_j(int order, double x) {
    int sign = 1;
    if (order < 0) {
        order = -order;
        if (order & 1) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (order & 1) sign = -sign;
    }
    return sign * boost::math::cyl_bessel_j(order, x);
}

namespace {

// Positive-term Maclaurin series of int_0^x e^{t^2} dt, then scale by
// e^{-x^2}.  No cancellation, usable up to |x| ~ 6 before e^{x^2} matters.
double dawson_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= x2 / n;
        sum += term / (2 * n + 1);
        if (term <= 1e-18 * sum * (2 * n + 3)) break;
    }
    return std::exp(-x2) * sum;
}

// D(x) = x - (1/2)/(x - 1/(x - (3/2)/(x - ...))), F = 1/(2D); modified Lentz.
double dawson_cf(double x) {
    const double tiny = 1e-300;
    double f = x, c = x, d = 0.0;
    for (int j = 1; j < 200; ++j) {
        const double a = -0.5 * j;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return 1.0 / (2.0 * f);
}

} // namespace

double dawson(double x) {
    const double ax = std::fabs(x);
    double v;
    // the continued fraction's accuracy floor near x ~ 4 sits above 1e-10;
    // the positive-term series stays exact-to-double out to ~6.5, so the
    // crossover lives at 5.5
    if (ax <= 5.5)
        v = dawson_series(ax);
    else if (ax <= 50.0)
        v = dawson_cf(ax);
    else {
        // asymptotic tail, relative error < 1e-13 here
        const double ix2 = 1.0 / (ax * ax);
        v = (0.5 / ax) * (1.0 + 0.5 * ix2 * (1.0 + 1.5 * ix2 * (1.0 + 2.5 * ix2)));
    }
    return x < 0.0 ? -v : v;
}

double incomplete_exp(int n, double xi) {
    if (n < 1) throw DomainError("incomplete_exp: n must be >= 1");
    if (xi < 0.0) throw DomainError("incomplete_exp: xi must be >= 0");
    double sum = 1.0, comp = 0.0, term = 1.0;
    for (int k = 1; k < n; ++k) {
        term *= xi / k;
        if (!std::isfinite(term) || term > 1e300)
            throw OverflowSignal("incomplete_exp: term overflow");
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double weighted_radial_factor(int ell, int k, double xi) {
    if (ell < 0 || k < -ell) throw DomainError("weighted_radial_factor: invalid indices");
    if (xi < 0.0) throw DomainError("weighted_radial_factor: xi must be >= 0");
    if (xi == 0.0) return k == 0 ? 1.0 : 0.0;
    if (k >= 0) {
        const double lg = 0.5 * (std::lgamma(ell + 1.0) - std::lgamma(ell + k + 1.0));
        return std::exp(0.5 * (k * std::log(xi) - xi) + lg) * laguerre_upper(ell, k, xi);
    }
    const int m = -k;
    const double lg = 0.5 * (std::lgamma(ell - m + 1.0) - std::lgamma(ell + 1.0));
    const double val =
        std::exp(0.5 * (m * std::log(xi) - xi) + lg) * laguerre_upper(ell - m, m, xi);
    return (m & 1) ? -val : val;
}

double g_function(int ell, int n, double xi) {
    if (ell < 0 || n < 1) throw DomainError("g_function: need ell >= 0, n >= 1");
    if (xi < 0.0) throw DomainError("g_function: xi must be >= 0");
    double sum = 0.0;
    for (int k = -ell; k <= n - ell - 1; ++k) {
        const double f = weighted_radial_factor(ell, k, xi);
        sum += f * f;
    }
    return sum;
}

double g_recurrence_defect(int ell, int n, double xi) {
    if (ell < 1) throw DomainError("g_recurrence_defect: ell must be >= 1");
    const double lhs = g_function(ell, n, xi) - g_function(ell - 1, n, xi);
    const int k = n - ell;
    double d;
    if (xi == 0.0) {
        d = (k == 0) ? -std::exp(std::lgamma(static_cast<double>(ell)) -
                                 std::lgamma(static_cast<double>(n))) *
                           laguerre(ell - 1, k, 0.0) * laguerre(ell, k, 0.0)
                     : 0.0;
    } else {
        const double m1 = laguerre(ell - 1, k, xi);
        const double m2 = laguerre(ell, k, xi);
        if (m1 == 0.0 || m2 == 0.0) {
            d = 0.0;
        } else {
            const double logpref = k * std::log(xi) - xi +
                                   std::lgamma(static_cast<double>(ell)) -
                                   std::lgamma(static_cast<double>(n));
            const double mag = std::exp(logpref + std::log(std::fabs(m1)) + std::log(std::fabs(m2)));
            d = -((m1 > 0) == (m2 > 0) ? mag : -mag);
        }
    }
    return lhs - d;
}

double g_tail_integral(int ell, int n) {
    if (ell < 0 || n < 1) throw DomainError("g_tail_integral: need ell >= 0, n >= 1");
    // fit the e^{-xi} envelope on a coarse grid, then cut where it certifies
    // a truncation error below 1e-12
    double a_fit = 0.0;
    for (double xi = 1.0; xi <= 50.0; xi += 0.25)
        a_fit = std::max(a_fit, g_function(ell, n, n * xi) * std::exp(xi));
    const double cutoff = std::max(2.0, std::log(std::max(a_fit, 1.0) * 1e12));
    const auto integrand = [ell, n](double xi) { return g_function(ell, n, n * xi); };
    return adaptive_simpson(integrand, 1.0, cutoff, 1e-12);
}

} // namespace lldos::specfun
