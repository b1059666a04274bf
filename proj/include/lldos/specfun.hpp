#pragma once

namespace lldos::specfun {

// Generalized Laguerre polynomial L^{(k)}_ell(xi) for integer k >= -ell.
// Negative superscripts go through the reflection identity
//   L^{(-m)}_ell(xi) = (-xi)^m ((ell-m)!/ell!) L^{(m)}_{ell-m}(xi),
// which keeps xi -> 0 finite.
double laguerre(int ell, int k, double xi);

// Legendre polynomial P_ell(x), three-term recurrence (valid for any real x).
double legendre(int ell, double x);

// Bessel function of the first kind, integer order, any real argument.
double bessel_j(int order, double x);

// Dawson integral F(x) = e^{-x^2} int_0^x e^{t^2} dt.
double dawson(double x);

// Incomplete exponential e_n(xi) = sum_{k<n} xi^k/k!, compensated summation.
double incomplete_exp(int n, double xi);

// Diagonal profile of the truncated Landau-level projection:
//   G_{ell,n}(xi) = e^{-xi} sum_{k=-ell}^{n-ell-1} (ell!/(k+ell)!) xi^k (L^{(k)}_ell(xi))^2.
// Smoothed step: ~1 below xi ~ n - 1/2, ~0 above, always within [0, 1].
double g_function(int ell, int n, double xi);

// G_{ell,n} - G_{ell-1,n} - D_{ell,n} with the closed-form step
//   D_{ell,n}(xi) = -e^{-xi} ((ell-1)!/(n-1)!) xi^{n-ell}
//                   L^{(n-ell)}_{ell-1}(xi) L^{(n-ell)}_ell(xi).
// Identically zero in exact arithmetic; exposed for validation.
double g_recurrence_defect(int ell, int n, double xi);

// Tail integral s_{ell,n} = int_1^inf G_{ell,n}(n xi) dxi.  The cutoff is
// certified with an empirically fitted envelope A e^{-xi}.
double g_tail_integral(int ell, int n);

// e^{-xi/2} sqrt(ell!/(ell+k)!) xi^{k/2} L^{(k)}_ell(xi): radial factor of the
// angular-momentum eigenfunctions at xi = B|x|^2/2, evaluated in log space so
// large k neither overflows nor spoils the xi -> 0 limit.  The square summed
// over k in a truncation window is exactly G_{ell,n}.
double weighted_radial_factor(int ell, int k, double xi);

} // namespace lldos::specfun
