#include "lldos/covariance.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "lldos/errors.hpp"
#include "lldos/quadrature.hpp"
#include "lldos/specfun.hpp"

namespace lldos {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be > 0");
}

} // namespace

CovarianceModel CovarianceModel::constant(double c0) {
    require_positive(c0, "c0");
    return {CovKind::constant, c0, 0.0, 0.0};
}

CovarianceModel CovarianceModel::gaussian(double c0, double tau) {
    require_positive(c0, "c0");
    require_positive(tau, "tau");
    return {CovKind::gaussian, c0, tau, 0.0};
}

CovarianceModel CovarianceModel::bessel_oscillating(double c0, double tau) {
    require_positive(c0, "c0");
    require_positive(tau, "tau");
    return {CovKind::bessel_oscillating, c0, tau, 0.0};
}

CovarianceModel CovarianceModel::poly_gaussian(double c0, double tau) {
    require_positive(c0, "c0");
    require_positive(tau, "tau");
    return {CovKind::poly_gaussian, c0, tau, 0.0};
}

CovarianceModel CovarianceModel::delta_limit(double alpha2) {
    require_positive(alpha2, "alpha2");
    return {CovKind::delta_limit, 0.0, 0.0, alpha2};
}

double CovarianceModel::c_zero() const {
    if (!proper()) throw UnsupportedModelError("delta-correlated model has no pointwise C(0)");
    return c0;
}

double CovarianceModel::alpha2_equiv() const {
    switch (kind) {
        case CovKind::delta_limit: return alpha2;
        case CovKind::gaussian: return 2.0 * M_PI * tau * tau * c0;
        default:
            throw UnsupportedModelError("alpha2 defined only for delta_limit and gaussian kinds");
    }
}

double evaluate(const CovarianceModel& model, double r) {
    const double r2 = r * r;
    switch (model.kind) {
        case CovKind::constant: return model.c0;
        case CovKind::gaussian:
            return model.c0 * std::exp(-r2 / (2.0 * model.tau * model.tau));
        case CovKind::bessel_oscillating:
            return model.c0 * specfun::bessel_j(0, std::sqrt(2.0) * r / model.tau);
        case CovKind::poly_gaussian: {
            const double s = r2 / (model.tau * model.tau);
            return model.c0 * std::exp(-0.5 * s) * (1.0 - 7.0 * s / 16.0 + s * s / 32.0);
        }
        case CovKind::delta_limit:
            throw UnsupportedModelError("delta-correlated covariance has no pointwise values");
    }
    return 0.0;
}

double evaluate(const CovarianceModel& model, PlanePoint x) {
    return evaluate(model, std::hypot(x.x1, x.x2));
}

SpectralMeasure spectral_measure(const CovarianceModel& model) {
    SpectralMeasure m;
    switch (model.kind) {
        case CovKind::constant:
            m.kind = SpectralMeasure::Kind::circle;
            m.circle_radius = 0.0;
            m.circle_mass = model.c0;
            m.scale_hint = 1.0;
            break;
        case CovKind::bessel_oscillating:
            m.kind = SpectralMeasure::Kind::circle;
            m.circle_radius = std::sqrt(2.0) / model.tau;
            m.circle_mass = model.c0;
            m.scale_hint = m.circle_radius;
            break;
        case CovKind::gaussian: {
            const double c0 = model.c0, t2 = model.tau * model.tau;
            m.density = [c0, t2](double k) {
                return c0 * t2 / (2.0 * M_PI) * std::exp(-0.5 * t2 * k * k);
            };
            m.scale_hint = 12.0 / model.tau;
            break;
        }
        case CovKind::poly_gaussian: {
            const double c0 = model.c0, t2 = model.tau * model.tau;
            m.density = [c0, t2](double k) {
                const double u = 0.5 * t2 * k * k;
                return c0 * t2 / (16.0 * M_PI) * std::exp(-u) * (3.0 + 3.0 * u + u * u);
            };
            m.scale_hint = 14.0 / model.tau;
            break;
        }
        case CovKind::delta_limit: {
            const double a2 = model.alpha2;
            m.density = [a2](double) { return a2 / (4.0 * M_PI * M_PI); };
            m.improper = true;
            m.scale_hint = std::numeric_limits<double>::infinity();
            break;
        }
    }
    return m;
}

double SpectralMeasure::total_mass() const {
    if (improper) throw UnsupportedModelError("improper spectral measure has infinite mass");
    if (kind == Kind::circle) return circle_mass;
    const double hi = scale_hint;
    return adaptive_simpson([this](double k) { return 2.0 * M_PI * k * density(k); }, 0.0, hi,
                            1e-14);
}

namespace {

// Polar convolution context for radial mu densities (coherent, maximizer,
// custom tables).  Radial Gauss-Laguerre in xi = B rho^2/2 when the density
// carries the e^{-xi} weight natively, Gauss-Legendre segments for tables.
struct RadialMu {
    std::vector<double> rho;    // support radii
    std::vector<double> mass;   // area weights: int f dmu ~ sum mass_i f(rho_i)
};

RadialMu discretize_state_density(int ell, int k, double B, int order) {
    // |phi_{ell,k}|^2 = (B/2pi) wrf(ell,k,xi)^2, unit mass
    const auto& rule = gauss_laguerre(order);
    RadialMu mu;
    mu.rho.resize(order);
    mu.mass.resize(order);
    for (int i = 0; i < order; ++i) {
        const double xi = rule.node[i];
        const double wrf = specfun::weighted_radial_factor(ell, k, xi);
        mu.rho[i] = std::sqrt(2.0 * xi / B);
        mu.mass[i] = std::exp(rule.logw[i] + xi) * wrf * wrf;
    }
    return mu;
}

RadialMu discretize_table(const std::vector<std::pair<double, double>>& table, int per_segment) {
    if (table.size() < 2) throw InvalidConfigError("custom_radial: need at least two table rows");
    for (std::size_t i = 1; i < table.size(); ++i)
        if (!(table[i].first > table[i - 1].first))
            throw InvalidConfigError("custom_radial: radii must be strictly increasing");
    const auto& gl = gauss_legendre(per_segment);
    RadialMu mu;
    auto value = [&table](double r) {
        if (r <= table.front().first) return table.front().second;
        for (std::size_t i = 1; i < table.size(); ++i) {
            if (r <= table[i].first) {
                const double f = (r - table[i - 1].first) / (table[i].first - table[i - 1].first);
                return (1.0 - f) * table[i - 1].second + f * table[i].second;
            }
        }
        return 0.0;
    };
    for (std::size_t s = 0; s < table.size(); ++s) {
        const double a = (s == 0) ? 0.0 : table[s - 1].first;
        const double b = table[s].first;
        for (int i = 0; i < per_segment; ++i) {
            const double r = 0.5 * (b - a) * (gl.node[i] + 1.0) + a;
            const double w = 0.5 * (b - a) * gl.weight[i];
            mu.rho.push_back(r);
            mu.mass.push_back(2.0 * M_PI * r * w * value(r));
        }
    }
    return mu;
}

// C_mu_raw(r) = sum_i mass_i * avg_theta C(|x - y_i|), |x| = r.
double convolve_at(const CovarianceModel& model, const RadialMu& mu, int n_angles, double r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.rho.size(); ++i) {
        if (mu.mass[i] == 0.0) continue;
        const double rho = mu.rho[i];
        double ang = 0.0;
        for (int a = 0; a < n_angles; ++a) {
            const double th = M_PI * (a + 0.5) / n_angles; // half-period symmetry
            const double dist2 = r * r + rho * rho - 2.0 * r * rho * std::cos(th);
            ang += evaluate(model, std::sqrt(std::max(dist2, 0.0)));
        }
        acc += mu.mass[i] * ang / n_angles;
    }
    return acc;
}

struct ConvolutionContext {
    CovarianceModel model;
    RadialMu mu;
    int n_angles = 64;
    double scale = 1.0; // sqrt of raw pairing, divides mu
    double eval(double r) const { return convolve_at(model, mu, n_angles, r) / scale; }
};

double pairing_raw(const CovarianceModel& model, const RadialMu& mu, int n_angles) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.rho.size(); ++i)
        if (mu.mass[i] != 0.0) acc += mu.mass[i] * convolve_at(model, mu, n_angles, mu.rho[i]);
    return acc;
}

double model_scale_radius(const CovarianceModel& model) {
    switch (model.kind) {
        case CovKind::gaussian:
        case CovKind::poly_gaussian: return 9.0 * model.tau;
        case CovKind::bessel_oscillating: return 40.0 * model.tau;
        default: return 1.0;
    }
}

void check_positivity(const std::function<double(double)>& f, double r_max, double scale) {
    const int samples = 400;
    for (int i = 0; i <= samples; ++i) {
        const double r = r_max * i / samples;
        if (f(r) < -1e-10 * std::max(scale, 1e-300))
            throw PositivityViolationError("c_mu: smoothed covariance is negative at r = " +
                                           std::to_string(r));
    }
}

} // namespace

CMuFunction c_mu(const CovarianceModel& model, const MuChoice& mu, double B) {
    if (mu.kind != MuKind::point_mass && mu.kind != MuKind::custom_radial && !(B > 0.0))
        throw DomainError("c_mu: B must be > 0 for state-density measures");

    CMuFunction out;

    if (model.kind == CovKind::constant) {
        // conv(C, mu_raw) = c0 * mass(mu_raw); every supported raw mu has unit
        // mass, so the normalized C_mu is the flat sqrt(c0).
        const double root = std::sqrt(model.c0);
        out.radial = [root](double) { return root; };
        out.mu_scale = root;
        out.normalization = 1.0;
        return out;
    }

    if (mu.kind == MuKind::point_mass) {
        const double c0 = model.c_zero();
        const double root = std::sqrt(c0);
        const CovarianceModel m = model;
        out.radial = [m, root](double r) { return evaluate(m, r) / root; };
        out.mu_scale = root;
        out.normalization = out.radial(0.0) / root;
        check_positivity(out.radial, model_scale_radius(model), root);
        return out;
    }

    if (!model.proper())
        throw UnsupportedModelError("c_mu: state-density mu needs a pointwise covariance");

    auto ctx = std::make_shared<ConvolutionContext>();
    ctx->model = model;

    const int k_index = (mu.kind == MuKind::maximizer_density) ? -mu.level : 0;
    double prev_pairing = 0.0;
    bool have_prev = false;
    int order = 128, angles = 64;
    double pairing = 0.0;
    for (int attempt = 0; attempt < 5; ++attempt) {
        ctx->mu = (mu.kind == MuKind::custom_radial)
                      ? discretize_table(mu.table, 24)
                      : discretize_state_density(mu.level, k_index, B, order);
        ctx->n_angles = angles;
        pairing = pairing_raw(model, ctx->mu, angles);
        if (have_prev && std::fabs(pairing - prev_pairing) <= 1e-9 * std::fabs(pairing)) break;
        prev_pairing = pairing;
        have_prev = true;
        order *= 2;
        angles *= 2;
    }
    if (!(pairing > 0.0))
        throw PositivityViolationError("c_mu: raw pairing int mu C_mu is not positive");

    ctx->scale = std::sqrt(pairing);
    out.mu_scale = ctx->scale;
    out.radial = [ctx](double r) { return ctx->eval(r); };
    // recheck normalization on the final grid: int mu C_mu = pairing / scale^2
    out.normalization = pairing / (ctx->scale * ctx->scale);

    const double mu_radius =
        ctx->mu.rho.empty() ? 1.0 : ctx->mu.rho.back();
    check_positivity(out.radial, std::max(model_scale_radius(model), mu_radius),
                     std::fabs(out.radial(0.0)));
    return out;
}

} // namespace lldos
