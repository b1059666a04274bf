#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "lldos/landau.hpp"

namespace lldos {

// Radial covariance models of the homogeneous Gaussian random potential.
enum class CovKind { constant, gaussian, bessel_oscillating, poly_gaussian, delta_limit };

struct CovarianceModel {
    CovKind kind = CovKind::gaussian;
    double c0 = 0.0;     // single-site variance C(0), absent for delta_limit
    double tau = 0.0;    // correlation length, absent for constant/delta_limit
    double alpha2 = 0.0; // white-noise strength, delta_limit only

    static CovarianceModel constant(double c0);
    static CovarianceModel gaussian(double c0, double tau);
    static CovarianceModel bessel_oscillating(double c0, double tau);
    static CovarianceModel poly_gaussian(double c0, double tau);
    static CovarianceModel delta_limit(double alpha2);

    bool proper() const { return kind != CovKind::delta_limit; }
    // C(0); throws for the delta limit which has no pointwise values.
    double c_zero() const;
    // White-noise strength: alpha2 for delta_limit, 2 pi tau^2 C(0) for the
    // gaussian kind (its tau -> 0 limit), otherwise unavailable.
    double alpha2_equiv() const;
};

double evaluate(const CovarianceModel& model, double r);
double evaluate(const CovarianceModel& model, PlanePoint x);

// Fourier representation C(x) = int Ctilde(d^2 k) e^{i k.x}.
struct SpectralMeasure {
    enum class Kind { radial_density, circle } kind = Kind::radial_density;
    std::function<double(double)> density; // mass per d^2k at |k|, radial
    double circle_radius = 0.0;
    double circle_mass = 0.0;
    bool improper = false; // delta limit: flat density with infinite mass
    double scale_hint = 1.0; // |k| beyond which the density is negligible

    double total_mass() const; // Bochner normalization, equals C(0)
};

SpectralMeasure spectral_measure(const CovarianceModel& model);

// Smoothing measures mu entering C_mu(x) = int mu(d^2 y) C(x-y).
enum class MuKind { point_mass, coherent_density, maximizer_density, custom_radial };

struct MuChoice {
    MuKind kind = MuKind::point_mass;
    // coherent_density: level whose psi_{ell,0} density is used;
    // maximizer_density: level whose phi_{ell,-ell} density is used.
    int level = 0;
    // custom_radial: sampled density values (radius, value), linearly
    // interpolated, zero beyond the last radius.
    std::vector<std::pair<double, double>> table;
};

// Normalized smoothed covariance: mu is rescaled so int mu(d^2y) C_mu(y) = 1.
struct CMuFunction {
    std::function<double(double)> radial;
    double mu_scale = 1.0;       // raw mu is divided by this (sqrt of raw pairing)
    double normalization = 1.0;  // recheck of int mu C_mu after rescaling
    double operator()(double r) const { return radial(r); }
};

// Throws PositivityViolationError if the smoothed covariance dips below
// -1e-10 anywhere sampled (e.g. the oscillating model, for which no valid mu
// exists), and UnsupportedModelError for pointwise-undefined models.
CMuFunction c_mu(const CovarianceModel& model, const MuChoice& mu, double B);

} // namespace lldos
