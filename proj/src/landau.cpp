#include "lldos/landau.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "lldos/errors.hpp"
#include "lldos/quadrature.hpp"
#include "lldos/specfun.hpp"

namespace lldos {

namespace {

constexpr std::complex<double> kImag{0.0, 1.0};

std::complex<double> ipow(int m) {
    switch (((m % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Radial profiles e^{-xi/2} u_{ell,k}(xi) tabulated on the Gauss-Laguerre
// grids.  Built lazily; read-only afterwards (warm up single-threaded).
const std::vector<double>& profile_on_grid(int ell, int k, int rule_n) {
    static std::map<std::tuple<int, int, int>, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(ell, k, rule_n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const auto& rule = gauss_laguerre(rule_n);
        std::vector<double> v(rule_n);
        for (int i = 0; i < rule_n; ++i) v[i] = specfun::weighted_radial_factor(ell, k, rule.node[i]);
        it = cache.emplace(key, std::move(v)).first;
    }
    return it->second;
}

// Quadrature order large enough that the Gauss-Laguerre nodes cover the
// classical support of the two profiles.
int initial_rule_order(int ell, int j, int k) {
    const int reach = ell + std::max(j, k) + ell;
    int need = (reach + 16 * static_cast<int>(std::sqrt(reach + 1.0)) + 64) / 3;
    int n = 128;
    while (n < need) n *= 2;
    return n;
}

} // namespace

LandauBasis::LandauBasis(double B_, int ell_, int n_) : B(B_), ell(ell_), n(n_) {
    if (!(B > 0.0)) throw DomainError("LandauBasis: B must be > 0");
    if (ell < 0) throw DomainError("LandauBasis: ell must be >= 0");
    if (n < 1) throw DomainError("LandauBasis: n must be >= 1");
}

double LandauBasis::radius_of_xi(double xi) const { return std::sqrt(2.0 * xi / B); }

std::complex<double> projection_kernel(const LandauBasis& basis, PlanePoint x, PlanePoint y) {
    const double dx1 = x.x1 - y.x1, dx2 = x.x2 - y.x2;
    const double dist2 = dx1 * dx1 + dx2 * dx2;
    const double phase = 0.5 * basis.B * (x.x2 * y.x1 - x.x1 * y.x2);
    const double xi = 0.5 * basis.B * dist2;
    return (basis.B / (2.0 * M_PI)) * std::exp(kImag * phase - 0.5 * xi) *
           specfun::laguerre(basis.ell, 0, xi);
}

std::complex<double> coherent_state(const LandauBasis& basis, PlanePoint x, PlanePoint y) {
    return std::sqrt(2.0 * M_PI / basis.B) * projection_kernel(basis, y, x);
}

std::complex<double> basis_function(const LandauBasis& basis, int k, PlanePoint x) {
    if (k < -basis.ell) throw DomainError("basis_function: k below -ell");
    const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
    const double xi = 0.5 * basis.B * r2;
    const double radial =
        std::sqrt(basis.B / (2.0 * M_PI)) * specfun::weighted_radial_factor(basis.ell, k, xi);
    const double theta = std::atan2(x.x2, x.x1);
    return radial * std::exp(kImag * (k * theta));
}

PlaneFunction magnetic_translate(const LandauBasis& basis, PlanePoint x, PlaneFunction f) {
    const double B = basis.B;
    return [B, x, f = std::move(f)](PlanePoint y) {
        const double phase = 0.5 * B * (x.x1 * y.x2 - x.x2 * y.x1);
        return std::exp(kImag * phase) * f(PlanePoint{y.x1 - x.x1, y.x2 - x.x2});
    };
}

double radial_matrix_element(const LandauBasis& basis, int j, int k,
                             const std::function<double(double)>& f_radial) {
    if (j < -basis.ell || k < -basis.ell) throw DomainError("radial_matrix_element: index below -ell");
    if (j != k) return 0.0; // angular selection rule

    int order = initial_rule_order(basis.ell, j, k);
    double prev = 0.0;
    bool have_prev = false;
    while (order <= 16384) {
        const auto& rule = gauss_laguerre(order);
        const auto& prof = profile_on_grid(basis.ell, k, order);
        double acc = 0.0;
        for (int i = 0; i < order; ++i) {
            const double w = std::exp(rule.logw[i] + rule.node[i]);
            if (w == 0.0) continue;
            acc += w * prof[i] * prof[i] * f_radial(basis.radius_of_xi(rule.node[i]));
        }
        if (have_prev && std::fabs(acc - prev) <= 1e-9 * std::max(std::fabs(acc), 1e-300))
            return acc;
        prev = acc;
        have_prev = true;
        order *= 2;
    }
    throw QuadratureError("radial_matrix_element: refinement stalled");
}

std::complex<double> plane_wave_matrix_element(const LandauBasis& basis, int j, int k, double q1,
                                               double q2) {
    if (j < -basis.ell || k < -basis.ell)
        throw DomainError("plane_wave_matrix_element: index below -ell");
    const int d = k - j;
    if (d < 0) return std::conj(plane_wave_matrix_element(basis, k, j, -q1, -q2));

    const double q = std::hypot(q1, q2);
    const double theta_q = std::atan2(q2, q1);

    int order = initial_rule_order(basis.ell, j, k);
    double prev = 0.0;
    bool have_prev = false;
    double radial = 0.0;
    bool converged = false;
    while (order <= 16384) {
        const auto& rule = gauss_laguerre(order);
        const auto& pj = profile_on_grid(basis.ell, j, order);
        const auto& pk = profile_on_grid(basis.ell, k, order);
        double acc = 0.0;
        for (int i = 0; i < order; ++i) {
            const double w = std::exp(rule.logw[i] + rule.node[i]);
            if (w == 0.0) continue;
            const double r = basis.radius_of_xi(rule.node[i]);
            acc += w * pj[i] * pk[i] * specfun::bessel_j(d, q * r);
        }
        if (have_prev && std::fabs(acc - prev) <= 1e-10 * std::max(1.0, std::fabs(acc))) {
            radial = acc;
            converged = true;
            break;
        }
        prev = acc;
        have_prev = true;
        order *= 2;
    }
    if (!converged) throw QuadratureError("plane_wave_matrix_element: refinement stalled");
    return ipow(d) * std::exp(kImag * (d * theta_q)) * radial;
}

std::complex<double> plane_wave_element_closed(const LandauBasis& basis, int j, int k, double q1,
                                               double q2) {
    if (j < -basis.ell || k < -basis.ell)
        throw DomainError("plane_wave_element_closed: index below -ell");
    const int d = k - j;
    const int ad = std::abs(d);
    const double t = (q1 * q1 + q2 * q2) / (2.0 * basis.B);
    const int a = std::min(j, k) + basis.ell;
    const double cyclotron = std::exp(-0.5 * t) * specfun::laguerre(basis.ell, 0, t);
    const double guiding = specfun::weighted_radial_factor(a, ad, t);
    const double theta_q = std::atan2(q2, q1);
    return ipow(ad) * std::exp(kImag * (d * theta_q)) * (cyclotron * guiding);
}

RadialGrid make_radial_grid(double radius, int radial_nodes, int angular_order) {
    if (!(radius > 0.0)) throw DomainError("make_radial_grid: radius must be > 0");
    if (angular_order < 2 || (angular_order % 2) != 0)
        throw DomainError("make_radial_grid: angular_order must be even and >= 2");
    const auto& gl = gauss_legendre(radial_nodes);
    RadialGrid grid;
    grid.angular_order = angular_order;
    grid.nodes.resize(radial_nodes);
    grid.weights.resize(radial_nodes);
    const double r2 = radius * radius;
    for (int i = 0; i < radial_nodes; ++i) {
        const double u = 0.5 * r2 * (gl.node[i] + 1.0);
        grid.nodes[i] = std::sqrt(u);
        grid.weights[i] = M_PI * 0.5 * r2 * gl.weight[i];
    }
    return grid;
}

} // namespace lldos
