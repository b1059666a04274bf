#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "lldos/covariance.hpp"

namespace lldos {

// Analytic upper bound on the restricted density of states.  Energy profile
// is either flat or a Gaussian of scale C(0); every curve is even in E.
struct BoundCurve {
    enum class Kind { wegner_flat, gaussian_cmu, gaussian_sigma, gaussian_boehm, gaussian_gamma };
    Kind kind = Kind::wegner_flat;
    double prefactor = 0.0; // value at E = 0
    double gauss_c0 = std::numeric_limits<double>::infinity(); // inf => flat
    std::map<std::string, double> metadata;

    double operator()(double E) const {
        if (!std::isfinite(gauss_c0)) return prefactor;
        return prefactor * std::exp(-E * E / (2.0 * gauss_c0));
    }
};

// sup_k <phi_{ell,k}, C_mu phi_{ell,k}> = ||P_ell C_mu P_ell|| for radial
// C_mu; certified by monotone-decay detection over 16 consecutive k.
double operator_norm_cmu(const CMuFunction& cmu, double B, int ell, int k_max = 4096);

// Flat estimate 1/(sqrt(2 pi) ||P_ell C_mu P_ell||).
BoundCurve bound_wegner_flat(const CovarianceModel& model, const MuChoice& mu, double B, int ell);

// Gaussian estimate e^{-E^2/2C(0)} / (sqrt(2 pi) <psi_{ell,0}, C_mu psi_{ell,0}>).
BoundCurve bound_gaussian_cmu(const CovarianceModel& model, const MuChoice& mu, double B, int ell);

// Weakened explicit form with prefactor C(0)/sigma_ell^2; degenerate-band
// error when the band variance vanishes.
BoundCurve bound_gaussian_sigma(const CovarianceModel& model, double B, int ell);

// Closed form of the gaussian-covariance lowest-level estimate
// sqrt((B tau^2 + 2)/(B tau^2)) e^{-E^2/2C(0)} / sqrt(2 pi C(0)).
BoundCurve bound_gaussian_boehm(const CovarianceModel& model, double B);

// Optimal-measure flat estimate 1/sqrt(2 pi Gamma_ell^2).
BoundCurve bound_gaussian_gamma(const CovarianceModel& model, double B, int ell);

// Exact lowest-level density of states of the delta-correlated limit.
// Beyond |E/sigma0| = 8 the asymptotic tail form is used (and flagged).
double reference_wegner(double sigma0, double E);
bool reference_wegner_is_asymptotic(double sigma0, double E);
double reference_wegner_cdf(double sigma0, double E);

// Semi-elliptic limit density on |E| <= 2 sigma0.
double reference_semielliptic(double sigma0, double E);
double reference_semielliptic_cdf(double sigma0, double E);

} // namespace lldos
