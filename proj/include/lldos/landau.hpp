#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace lldos {

struct PlanePoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

// Truncated angular-momentum eigenspace of one Landau level: magnetic field
// B (units hbar = mass = charge = 1), level index ell, truncation dimension n.
// The n basis states carry angular momenta k = -ell, ..., n - ell - 1.
struct LandauBasis {
    double B;
    int ell;
    int n;

    LandauBasis(double B_, int ell_, int n_);

    int k_min() const { return -ell; }
    int k_max() const { return n - ell - 1; }
    // xi = B |x|^2 / 2
    double xi_of_radius(double r) const { return 0.5 * B * r * r; }
    double radius_of_xi(double xi) const;
};

// Kernel of the Landau-level eigenprojection P_ell(x, y); the diagonal equals
// the degeneracy per area B/(2 pi).
std::complex<double> projection_kernel(const LandauBasis& basis, PlanePoint x, PlanePoint y);

// Normalized coherent state psi_{ell,x} evaluated at y.
std::complex<double> coherent_state(const LandauBasis& basis, PlanePoint x, PlanePoint y);

// Angular-momentum eigenfunction phi_{ell,k}(x), k >= -ell.
std::complex<double> basis_function(const LandauBasis& basis, int k, PlanePoint x);

using PlaneFunction = std::function<std::complex<double>(PlanePoint)>;

// Magnetic translation (T_x f)(y) = exp[i B (x1 y2 - x2 y1)/2] f(y - x).
PlaneFunction magnetic_translate(const LandauBasis& basis, PlanePoint x, PlaneFunction f);

// <phi_{ell,j}, f phi_{ell,k}> for a bounded radial f.  Exactly zero off the
// diagonal (angular selection rule); the diagonal is computed by adaptive
// Gauss-Laguerre quadrature in xi = B r^2/2 to relative accuracy 1e-8.
double radial_matrix_element(const LandauBasis& basis, int j, int k,
                             const std::function<double(double)>& f_radial);

// <phi_{ell,j}, e^{i q.x} phi_{ell,k}>: phase e^{i(k-j)arg q} times i^{|k-j|}
// times a radial integral of the two profiles against J_{|k-j|}(|q| r).
// Radial profiles are cached on the active quadrature grid.
std::complex<double> plane_wave_matrix_element(const LandauBasis& basis, int j, int k, double q1,
                                               double q2);

// Same matrix element through the closed Gaussian-Laguerre form
//   i^{|d|} e^{i d arg q} e^{-t} L_ell(t) sqrt(a!/b!) t^{|d|/2} L^{(|d|)}_a(t),
// t = |q|^2/(2B), a = min(j,k)+ell, b = max(j,k)+ell, d = k-j.  Identical to
// the quadrature route; used on hot paths (samplers, tensor assembly).
std::complex<double> plane_wave_element_closed(const LandauBasis& basis, int j, int k, double q1,
                                               double q2);

// Polar quadrature grid covering a disk: Gauss-Legendre in r^2 so the area
// weights sum to pi R^2 exactly, times an even number of equispaced angles.
struct RadialGrid {
    std::vector<double> nodes;    // radii, ascending
    std::vector<double> weights;  // area weights, sum = pi * radius^2
    int angular_order = 0;

    // integrate a function given in polar coordinates over the disk
    template <typename F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double ang = 0.0;
            for (int a = 0; a < angular_order; ++a)
                ang += f(nodes[i], 2.0 * M_PI * a / angular_order);
            acc += weights[i] * ang / angular_order;
        }
        return acc;
    }
};

RadialGrid make_radial_grid(double radius, int radial_nodes, int angular_order);

} // namespace lldos
