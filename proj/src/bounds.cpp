#include "lldos/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>
#include <vector>

#include "lldos/bands.hpp"
#include "lldos/errors.hpp"
#include "lldos/quadrature.hpp"
#include "lldos/specfun.hpp"

namespace lldos {

namespace {

// Memoize C_mu on the quadrature radii; the convolution behind each
// evaluation is far more expensive than the lookup.
std::function<double(double)> memoized(const CMuFunction& cmu) {
    auto cache = std::make_shared<std::unordered_map<double, double>>();
    auto f = cmu.radial;
    return [cache, f](double r) {
        auto it = cache->find(r);
        if (it != cache->end()) return it->second;
        const double v = f(r);
        cache->emplace(r, v);
        return v;
    };
}

double pair_with_coherent(const CMuFunction& cmu, double B, int ell) {
    const LandauBasis basis(B, ell, 1);
    return radial_matrix_element(basis, 0, 0, memoized(cmu));
}

} // namespace

double operator_norm_cmu(const CMuFunction& cmu, double B, int ell, int k_max) {
    const LandauBasis basis(B, ell, 1);
    const auto f = memoized(cmu);
    double sup = -std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    double scale = std::max(std::fabs(cmu(0.0)), 1e-300);
    int streak = 0;
    for (int k = -ell; k <= k_max; ++k) {
        const double dk = radial_matrix_element(basis, k, k, f);
        sup = std::max(sup, dk);
        scale = std::max(scale, std::fabs(dk));
        if (dk <= prev + 1e-12 * scale)
            ++streak;
        else
            streak = 0;
        prev = dk;
        if (streak >= 16 && k >= 0) return sup;
    }
    throw NonconvergenceError("operator_norm_cmu: no certified supremum up to k_max");
}

BoundCurve bound_wegner_flat(const CovarianceModel& model, const MuChoice& mu, double B, int ell) {
    const CMuFunction cmu = c_mu(model, mu, B);
    const double norm = operator_norm_cmu(cmu, B, ell);
    const double pair = pair_with_coherent(cmu, B, ell);
    BoundCurve curve;
    curve.kind = BoundCurve::Kind::wegner_flat;
    curve.prefactor = 1.0 / (std::sqrt(2.0 * M_PI) * norm);
    curve.metadata["norm_PCmuP"] = norm;
    curve.metadata["pair_psi_Cmu_psi"] = pair;
    return curve;
}

BoundCurve bound_gaussian_cmu(const CovarianceModel& model, const MuChoice& mu, double B, int ell) {
    const double c0 = model.c_zero(); // Gaussian profile needs pointwise C(0)
    const CMuFunction cmu = c_mu(model, mu, B);
    const double pair = pair_with_coherent(cmu, B, ell);
    if (!(pair > 0.0))
        throw PositivityViolationError("bound_gaussian_cmu: coherent pairing not positive");
    BoundCurve curve;
    curve.kind = BoundCurve::Kind::gaussian_cmu;
    curve.prefactor = 1.0 / (std::sqrt(2.0 * M_PI) * pair);
    curve.gauss_c0 = c0;
    curve.metadata["pair_psi_Cmu_psi"] = pair;
    curve.metadata["C0"] = c0;
    return curve;
}

BoundCurve bound_gaussian_sigma(const CovarianceModel& model, double B, int ell) {
    const double c0 = model.c_zero();
    const double s2 = sigma2(model, LandauBasis(B, ell, 1));
    if (s2 <= 1e-13 * c0)
        throw DegenerateBandError("bound_gaussian_sigma: band variance vanishes at this tuning");
    BoundCurve curve;
    curve.kind = BoundCurve::Kind::gaussian_sigma;
    curve.prefactor = (c0 / s2) / std::sqrt(2.0 * M_PI * c0);
    curve.gauss_c0 = c0;
    curve.metadata["sigma2"] = s2;
    curve.metadata["C0"] = c0;
    return curve;
}

BoundCurve bound_gaussian_boehm(const CovarianceModel& model, double B) {
    if (model.kind != CovKind::gaussian)
        throw UnsupportedModelError("bound_gaussian_boehm: gaussian covariance only");
    const double c0 = model.c0;
    const double b = B * model.tau * model.tau;
    BoundCurve curve;
    curve.kind = BoundCurve::Kind::gaussian_boehm;
    curve.prefactor = std::sqrt((b + 2.0) / b) / std::sqrt(2.0 * M_PI * c0);
    curve.gauss_c0 = c0;
    curve.metadata["B_tau2"] = b;
    curve.metadata["C0"] = c0;
    return curve;
}

BoundCurve bound_gaussian_gamma(const CovarianceModel& model, double B, int ell) {
    double g2;
    switch (model.kind) {
        case CovKind::constant:
        case CovKind::gaussian:
        case CovKind::delta_limit: g2 = gamma2_closed_form(model, B, ell); break;
        default: g2 = gamma2_maximizer(model, B, ell); break;
    }
    const double scale = model.proper() ? model.c_zero() : model.alpha2 * B;
    if (g2 <= 1e-13 * scale)
        throw DegenerateBandError("bound_gaussian_gamma: decay energy vanishes at this tuning");
    BoundCurve curve;
    curve.kind = BoundCurve::Kind::gaussian_gamma;
    curve.prefactor = 1.0 / std::sqrt(2.0 * M_PI * g2);
    curve.metadata["gamma2"] = g2;
    return curve;
}

bool reference_wegner_is_asymptotic(double sigma0, double E) {
    return std::fabs(E / sigma0) > 8.0;
}

double reference_wegner(double sigma0, double E) {
    if (!(sigma0 > 0.0)) throw DomainError("reference_wegner: sigma0 must be > 0");
    const double eta = E / sigma0;
    const double a = std::fabs(eta);
    const double f = specfun::dawson(a);
    if (a <= 8.0) {
        // int_0^eta e^{xi^2} dxi = e^{eta^2} F(eta)
        const double e1 = std::exp(eta * eta);
        return (2.0 / (std::pow(M_PI, 1.5) * sigma0)) * e1 /
               (1.0 + (4.0 / M_PI) * (e1 * f) * (e1 * f));
    }
    // tail form: the unit in the denominator is e^{-2 eta^2}-negligible
    return std::exp(-eta * eta) / (2.0 * std::sqrt(M_PI) * sigma0 * f * f);
}

namespace {

// Cumulative integral of the unit-sigma Wegner density on [0, 8], built once.
const std::vector<double>& wegner_cdf_table() {
    static const std::vector<double> table = [] {
        constexpr int kPoints = 4001; // eta grid step 0.002
        std::vector<double> tab(kPoints, 0.0);
        double acc = 0.0;
        double prev = reference_wegner(1.0, 0.0);
        for (int i = 1; i < kPoints; ++i) {
            const double h = 8.0 / (kPoints - 1);
            const double mid = reference_wegner(1.0, (i - 0.5) * h);
            const double cur = reference_wegner(1.0, i * h);
            acc += h / 6.0 * (prev + 4.0 * mid + cur);
            tab[i] = acc;
            prev = cur;
        }
        return tab;
    }();
    return table;
}

} // namespace

double reference_wegner_cdf(double sigma0, double E) {
    const auto& tab = wegner_cdf_table();
    const double eta = std::fabs(E) / sigma0;
    double half;
    if (eta >= 8.0) {
        half = tab.back();
    } else {
        const double pos = eta / 8.0 * (tab.size() - 1);
        const int i = static_cast<int>(pos);
        const double f = pos - i;
        half = (1.0 - f) * tab[i] + f * tab[i + 1];
    }
    // mass beyond eta = 8 is below 1e-26; fold it into the edge
    half = std::min(half, 0.5);
    return E >= 0.0 ? 0.5 + half : 0.5 - half;
}

double reference_semielliptic(double sigma0, double E) {
    if (!(sigma0 > 0.0)) throw DomainError("reference_semielliptic: sigma0 must be > 0");
    const double eta = E / sigma0;
    const double supp = 4.0 - eta * eta;
    if (supp <= 0.0) return 0.0;
    return std::sqrt(supp) / (2.0 * M_PI * sigma0);
}

double reference_semielliptic_cdf(double sigma0, double E) {
    const double eta = std::clamp(E / sigma0, -2.0, 2.0);
    return 0.5 + (eta * std::sqrt(4.0 - eta * eta) / 2.0 + 2.0 * std::asin(eta / 2.0)) /
                     (2.0 * M_PI);
}

} // namespace lldos
