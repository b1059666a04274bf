#include <doctest.h>

#include <cmath>
#include <complex>

#include "lldos/covariance.hpp"
#include "lldos/errors.hpp"
#include "lldos/landau.hpp"
#include "lldos/rng.hpp"
#include "lldos/specfun.hpp"
#include "oracles.hpp"

using namespace lldos;
using cplx = std::complex<double>;

namespace {
PlanePoint polar(double r, double th) { return {r * std::cos(th), r * std::sin(th)}; }
} // namespace

TEST_CASE("projection_kernel: diagonal, explicit value, reproducing property") {
    for (double B : {0.5, 1.0, 3.0})
        for (int ell : {0, 1, 4}) {
            const LandauBasis basis(B, ell, 4);
            const cplx diag = projection_kernel(basis, {0.3, -1.2}, {0.3, -1.2});
            CHECK(diag.real() == doctest::Approx(B / (2.0 * M_PI)).epsilon(1e-14));
            CHECK(diag.imag() == 0.0);
        }
    const LandauBasis b0(1.0, 0, 4);
    const cplx v = projection_kernel(b0, {0.0, 0.0}, {2.0, 0.0});
    CHECK(v.real() == doctest::Approx(std::exp(-1.0) / (2.0 * M_PI)).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0));

    // kernel composition: int d^2z P(x,z) P(z,y) = P(x,y)
    const LandauBasis b1(1.0, 1, 4);
    const PlanePoint x{0.7, 0.2}, y{-0.4, 1.1};
    const cplx direct = projection_kernel(b1, x, y);
    const cplx composed = oracles::polar_integral_c(
        [&](double r, double th) {
            const PlanePoint z = polar(r, th);
            return projection_kernel(b1, x, z) * projection_kernel(b1, z, y);
        },
        12.0, 160, 128);
    CHECK(std::abs(composed - direct) <= 1e-6);
}

TEST_CASE("coherent_state: normalization and translation covariance") {
    for (int ell : {0, 2}) {
        const LandauBasis basis(1.0, ell, 4);
        const PlanePoint x{0.9, -0.5};
        const double norm = oracles::polar_integral(
            [&](double r, double th) { return std::norm(coherent_state(basis, x, polar(r, th))); },
            14.0, 200, 96);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));

        // psi_{ell,0} coincides with the k = 0 basis function
        for (double r : {0.0, 0.4, 1.7})
            for (double th : {0.0, 1.1, 4.4}) {
                const PlanePoint p = polar(r, th);
                CHECK(std::abs(coherent_state(basis, {0, 0}, p) - basis_function(basis, 0, p)) <=
                      1e-12);
            }

        // psi_{ell,x} = T_x psi_{ell,0}
        auto psi0 = [&](PlanePoint p) { return coherent_state(basis, {0, 0}, p); };
        auto shifted = magnetic_translate(basis, x, psi0);
        for (double r : {0.2, 1.3, 2.4})
            for (double th : {0.3, 2.0, 5.5}) {
                const PlanePoint p = polar(r, th);
                CHECK(std::abs(coherent_state(basis, x, p) - shifted(p)) <= 1e-12);
            }
    }
}

TEST_CASE("basis_function: explicit value, orthonormality, completeness profile") {
    const LandauBasis b0(1.0, 0, 4);
    CHECK(basis_function(b0, 0, {0, 0}).real() ==
          doctest::Approx(std::sqrt(1.0 / (2.0 * M_PI))).epsilon(1e-14));
    CHECK_THROWS_AS(basis_function(b0, -1, {0, 0}), DomainError);

    for (int ell : {0, 1, 3}) {
        const LandauBasis basis(1.0, ell, 13 + ell);
        for (int j = -ell; j <= 12 - ell; j += 3)
            for (int k = j; k <= 12 - ell; k += 4) {
                const cplx g = oracles::polar_integral_c(
                    [&](double r, double th) {
                        const PlanePoint p = polar(r, th);
                        return std::conj(basis_function(basis, j, p)) *
                               basis_function(basis, k, p);
                    },
                    16.0, 256, 64);
                CHECK(std::abs(g - (j == k ? 1.0 : 0.0)) <= 1e-8);
            }
    }

    // sum_k |phi_{ell,k}(x)|^2 = (B/2pi) G_{ell,n}(B|x|^2/2)
    for (int ell : {0, 2})
        for (double B : {1.0, 2.5}) {
            const LandauBasis basis(B, ell, 24);
            for (double r : {0.0, 0.8, 2.9, 5.0}) {
                double acc = 0.0;
                for (int k = basis.k_min(); k <= basis.k_max(); ++k)
                    acc += std::norm(basis_function(basis, k, polar(r, 0.7)));
                const double xi = 0.5 * B * r * r;
                CHECK(acc == doctest::Approx(B / (2.0 * M_PI) *
                                             specfun::g_function(ell, 24, xi))
                                 .epsilon(1e-10));
            }
        }
}

TEST_CASE("magnetic_translate: identity, modulus shift, unitarity") {
    const LandauBasis basis(1.3, 1, 4);
    auto f = [&](PlanePoint p) {
        const double g = std::exp(-0.3 * (p.x1 * p.x1 + p.x2 * p.x2));
        return cplx(g, 0.4 * p.x1 * g);
    };
    auto ident = magnetic_translate(basis, {0, 0}, f);
    auto moved = magnetic_translate(basis, {1.2, -0.7}, f);
    for (double r : {0.0, 0.9, 2.2})
        for (double th : {0.2, 3.0}) {
            const PlanePoint p = polar(r, th);
            CHECK(std::abs(ident(p) - f(p)) == 0.0);
            // phase times shift: |T_x f|(p) = |f(p - x)| exactly
            CHECK(std::abs(moved(p)) ==
                  doctest::Approx(std::abs(f({p.x1 - 1.2, p.x2 + 0.7}))).epsilon(1e-15));
        }
    // norm preservation under quadrature
    const double n0 = oracles::polar_integral(
        [&](double r, double th) { return std::norm(f(polar(r, th))); }, 9.0, 128, 64);
    const double n1 = oracles::polar_integral(
        [&](double r, double th) { return std::norm(moved(polar(r, th))); }, 11.0, 160, 64);
    CHECK(n1 == doctest::Approx(n0).epsilon(1e-8));
}

TEST_CASE("radial_matrix_element: selection rule, constants, gaussian value, monotone decay") {
    const LandauBasis basis(1.0, 1, 8);
    auto constant = [](double) { return 2.75; };
    CHECK(radial_matrix_element(basis, 0, 3, constant) == 0.0);
    for (int k : {-1, 0, 2, 11})
        CHECK(radial_matrix_element(basis, k, k, constant) == doctest::Approx(2.75).epsilon(1e-10));

    // <phi_00, C phi_00> for the gaussian covariance: frozen from the 2D
    // quadrature oracle, equals C(0) B tau^2/(B tau^2 + 1)
    const double c0 = 2.0, tau = 1.5, B = 1.0;
    const auto model = CovarianceModel::gaussian(c0, tau);
    const LandauBasis b0(B, 0, 4);
    const double from_oracle = oracles::polar_integral(
        [&](double r, double th) {
            return std::norm(basis_function(b0, 0, polar(r, th))) * evaluate(model, r);
        },
        18.0, 300, 8);
    const double b2 = B * tau * tau;
    CHECK(from_oracle == doctest::Approx(c0 * b2 / (b2 + 1.0)).epsilon(1e-8));
    auto cfun = [&](double r) { return evaluate(model, r); };
    CHECK(radial_matrix_element(b0, 0, 0, cfun) == doctest::Approx(from_oracle).epsilon(1e-8));

    // diagonal sweep decays monotonically in k for the gaussian covariance
    double prev = radial_matrix_element(b0, 0, 0, cfun);
    for (int k = 1; k <= 24; ++k) {
        const double cur = radial_matrix_element(b0, k, k, cfun);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    // stays accurate far out in angular momentum (large-k grids)
    CHECK(radial_matrix_element(b0, 1500, 1500, constant) ==
          doctest::Approx(2.75).epsilon(1e-8));
}

TEST_CASE("plane_wave_matrix_element: orthonormality limit, symmetry, closed forms") {
    const LandauBasis basis(1.0, 1, 8);
    for (int j : {-1, 0, 2})
        for (int k : {-1, 1, 3}) {
            const cplx v = plane_wave_matrix_element(basis, j, k, 0.0, 0.0);
            CHECK(std::abs(v - (j == k ? 1.0 : 0.0)) <= 1e-9);
        }

    // Hermitian symmetry on pseudo-random arguments
    CounterRng rng(7, 0, CounterRng::kGeneric);
    for (int trial = 0; trial < 12; ++trial) {
        const int j = static_cast<int>(rng.next_u64() % 6) - 1;
        const int k = static_cast<int>(rng.next_u64() % 6) - 1;
        const double q1 = 2.0 * rng.next_uniform() - 1.0;
        const double q2 = 2.0 * rng.next_uniform() - 1.0;
        const cplx a = plane_wave_matrix_element(basis, j, k, q1, q2);
        const cplx b = std::conj(plane_wave_matrix_element(basis, k, j, -q1, -q2));
        CHECK(std::abs(a - b) <= 1e-10);
        const cplx c = plane_wave_element_closed(basis, j, k, q1, q2);
        CHECK(std::abs(a - c) <= 1e-8);
    }

    // lowest-level ground state: <phi_00, e^{iq.x} phi_00> = e^{-|q|^2/(2B)},
    // frozen from the closed Gaussian integral oracle
    const LandauBasis b0(1.0, 0, 4);
    const cplx g_oracle = oracles::polar_integral_c(
        [&](double r, double th) {
            const PlanePoint p = polar(r, th);
            return std::norm(basis_function(b0, 0, p)) * std::exp(cplx(0, p.x1));
        },
        14.0, 220, 128);
    CHECK(std::abs(g_oracle - std::exp(-0.5)) <= 1e-9);
    CHECK(std::abs(plane_wave_matrix_element(b0, 0, 0, 1.0, 0.0) - std::exp(-0.5)) <= 1e-10);

    // diagonal elements reproduce the one-level form factor e^{-t} L_ell(t) L_m(t)
    const LandauBasis b2(2.0, 2, 8);
    for (int k : {-2, 0, 3}) {
        const double q = 1.7;
        const double t = q * q / (2.0 * b2.B);
        const cplx v = plane_wave_matrix_element(b2, k, k, q, 0.0);
        const double want = std::exp(-t) * specfun::laguerre(2, 0, t) *
                            specfun::laguerre(k + 2, 0, t);
        CHECK(v.real() == doctest::Approx(want).epsilon(1e-9));
        CHECK(std::fabs(v.imag()) <= 1e-12);
    }
}

TEST_CASE("radial grid: area weights and even angular order") {
    const RadialGrid grid = make_radial_grid(3.0, 64, 32);
    double total = 0.0;
    for (double w : grid.weights) total += w;
    CHECK(total == doctest::Approx(M_PI * 9.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_radial_grid(3.0, 64, 31), DomainError);
    const double gauss = grid.integrate([](double r, double) { return std::exp(-r * r); });
    CHECK(gauss == doctest::Approx(M_PI * (1.0 - std::exp(-9.0))).epsilon(1e-10));
}
