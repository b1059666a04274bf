#include "lldos/bands.hpp"

#include <cmath>

#include "lldos/errors.hpp"
#include "lldos/quadrature.hpp"
#include "lldos/rng.hpp"
#include "lldos/specfun.hpp"

namespace lldos {

namespace {

// e^{-t/2} L_ell(t): the level form factor common to every matrix element.
double cyclotron_factor(int ell, double t) {
    return std::exp(-0.5 * t) * specfun::laguerre(ell, 0, t);
}

// Decayed pair-correlation factor F(t) = cyc(t) * wrf(a, |d|, t); the full
// matrix element is i^{|d|} e^{i d theta_q} F.
double pair_factor(int ell, int j, int k, double t) {
    const int a = std::min(j, k) + ell;
    const int d = std::abs(k - j);
    return cyclotron_factor(ell, t) * specfun::weighted_radial_factor(a, d, t);
}

double effective_decay_rate(const CovarianceModel& model) {
    switch (model.kind) {
        case CovKind::gaussian:
        case CovKind::poly_gaussian: return model.tau * model.tau; // times B below
        default: return 0.0;
    }
}

} // namespace

SpectralNodes spectral_nodes(const CovarianceModel& model, double B, int degree_hint) {
    SpectralNodes out;
    const SpectralMeasure sm = spectral_measure(model);
    if (sm.kind == SpectralMeasure::Kind::circle) {
        out.t.push_back(sm.circle_radius * sm.circle_radius / (2.0 * B));
        out.omega.push_back(sm.circle_mass);
        return out;
    }
    const double b = effective_decay_rate(model) * B;
    const double c = 2.0 + b;
    const int n_nodes = (3 * degree_hint) / 2 + 96;
    const auto& rule = gauss_laguerre(n_nodes);
    out.t.resize(n_nodes);
    out.omega.resize(n_nodes);
    for (int m = 0; m < n_nodes; ++m) {
        const double s = rule.node[m];
        const double t = s / c;
        const double k = std::sqrt(2.0 * B * t);
        // omega = (w e^{s}) S(t)/c with S(t) = 2 pi B density(k); the decay
        // e^{-2t} sits inside the two F factors and combines with the density
        // to reproduce the plain Gauss-Laguerre weight, so polynomial parts
        // integrate exactly.
        out.t[m] = t;
        out.omega[m] = std::exp(rule.logw[m] + s) * (2.0 * M_PI * B / c) * sm.density(k);
    }
    return out;
}

double sigma2(const CovarianceModel& model, const LandauBasis& basis) {
    const int ell = basis.ell;
    const SpectralMeasure sm = spectral_measure(model);
    if (sm.kind == SpectralMeasure::Kind::circle) {
        const double t = sm.circle_radius * sm.circle_radius / (2.0 * basis.B);
        const double l = specfun::laguerre(ell, 0, t);
        return sm.circle_mass * std::exp(-t) * l * l;
    }
    // one-level form factor e^{-t} L_ell(t)^2 against the radial density
    const double b = effective_decay_rate(model) * basis.B;
    const double c = 1.0 + b;
    const auto& rule = gauss_laguerre(2 * ell + 64);
    double acc = 0.0;
    for (int m = 0; m < rule.n; ++m) {
        const double s = rule.node[m];
        const double t = s / c;
        const double k = std::sqrt(2.0 * basis.B * t);
        const double l = specfun::laguerre(ell, 0, t);
        acc += std::exp(rule.logw[m] + s) * (2.0 * M_PI * basis.B / c) * sm.density(k) *
               std::exp(-t) * l * l;
    }
    return acc;
}

double gamma2_closed_form(const CovarianceModel& model, double B, int ell) {
    switch (model.kind) {
        case CovKind::constant: return model.c0;
        case CovKind::gaussian: {
            const double b = B * model.tau * model.tau;
            const double s = b + 1.0;
            const double arg = (s * s + 1.0) / (s * s - 1.0);
            return model.c0 * std::pow(b / (b + 2.0), ell + 1) * specfun::legendre(ell, arg);
        }
        case CovKind::delta_limit: {
            // (alpha^2 B / 4 pi) (2 ell)! / (ell! 2^ell)^2
            const double logf = std::lgamma(2.0 * ell + 1.0) - 2.0 * std::lgamma(ell + 1.0) -
                                2.0 * ell * M_LN2;
            return model.alpha2 * B / (4.0 * M_PI) * std::exp(logf);
        }
        default:
            throw UnsupportedModelError("gamma2_closed_form: no closed form for this model");
    }
}

namespace {

double gamma2_pair_quadrature(const CovarianceModel& model, double B, int ell, int j, int k) {
    const SpectralNodes nodes = spectral_nodes(model, B, 2 * ell + std::max(j, k) + 8);
    double acc = 0.0;
    for (std::size_t m = 0; m < nodes.t.size(); ++m) {
        const double f = pair_factor(ell, j, k, nodes.t[m]);
        acc += nodes.omega[m] * f * f;
    }
    return acc;
}

} // namespace

double gamma2_coherent(const CovarianceModel& model, double B, int ell) {
    return gamma2_pair_quadrature(model, B, ell, 0, 0);
}

double gamma2_maximizer(const CovarianceModel& model, double B, int ell) {
    return gamma2_pair_quadrature(model, B, ell, -ell, -ell);
}

CouplingTensor::CouplingTensor(const CovarianceModel& model, const LandauBasis& basis)
    : basis_(basis) {
    const int n = basis.n;
    const int ell = basis.ell;
    if (n > 128)
        throw DomainError("CouplingTensor: truncation above 128 is not supported");
    const SpectralNodes nodes = spectral_nodes(model, basis.B, 2 * ell + 2 * n);
    const int n_nodes = static_cast<int>(nodes.t.size());

    // per-node factors F_{j,j+d}(t_m), organized per d
    std::vector<Eigen::MatrixXd> factors(n);
    for (int d = 0; d < n; ++d) {
        factors[d].resize(n - d, n_nodes);
        for (int m = 0; m < n_nodes; ++m) {
            const double t = nodes.t[m];
            const double cyc = cyclotron_factor(ell, t);
            for (int j = 0; j < n - d; ++j) {
                // lower angular index j - ell, guiding index a = j
                factors[d](j, m) = cyc * specfun::weighted_radial_factor(j, d, t);
            }
        }
    }

    materialized_ = n <= 64;
    if (materialized_) {
        blocks_.resize(n);
        Eigen::VectorXd om = Eigen::Map<const Eigen::VectorXd>(nodes.omega.data(), n_nodes);
        for (int d = 0; d < n; ++d)
            blocks_[d] = factors[d] * om.asDiagonal() * factors[d].transpose();
    } else {
        node_factors_ = std::move(factors);
        node_omega_ = nodes.omega;
    }
}

const Eigen::MatrixXd& CouplingTensor::block(int d) const {
    if (!materialized_) throw DomainError("CouplingTensor: blocks not materialized at this n");
    return blocks_.at(d);
}

double CouplingTensor::entry(int j, int k, int j2, int k2) const {
    const int n = basis_.n;
    if (j < 0 || k < 0 || j2 < 0 || k2 < 0 || j >= n || k >= n || j2 >= n || k2 >= n)
        throw DomainError("CouplingTensor::entry: index out of range");
    const int d = k - j, d2 = k2 - j2;
    if (d != d2) return 0.0; // angular selection rule
    const int ad = std::abs(d);
    const int lo = std::min(j, k);
    const int lo2 = std::min(j2, k2);
    if (materialized_) return blocks_[ad](lo, lo2);
    double acc = 0.0;
    for (std::size_t m = 0; m < node_omega_.size(); ++m)
        acc += node_omega_[m] * node_factors_[ad](lo, m) * node_factors_[ad](lo2, m);
    return acc;
}

double CouplingTensor::gamma_functional(const Eigen::VectorXcd& coeff) const {
    const int n = basis_.n;
    if (coeff.size() != n) throw DomainError("gamma_functional: coefficient size mismatch");
    double total = 0.0;
    for (int d = 0; d < n; ++d) {
        Eigen::VectorXcd rho(n - d);
        for (int j = 0; j < n - d; ++j) rho(j) = std::conj(coeff(j)) * coeff(j + d);
        double val;
        if (materialized_) {
            val = rho.dot(blocks_[d] * rho).real(); // rho^dagger A rho
        } else {
            const Eigen::VectorXcd proj = node_factors_[d].transpose() * rho;
            double acc = 0.0;
            for (std::size_t m = 0; m < node_omega_.size(); ++m)
                acc += node_omega_[m] * std::norm(proj(m));
            val = acc;
        }
        total += (d == 0) ? val : 2.0 * val;
    }
    return total;
}

Eigen::VectorXcd CouplingTensor::apply(const Eigen::VectorXcd& coeff) const {
    const int n = basis_.n;
    if (coeff.size() != n) throw DomainError("apply: coefficient size mismatch");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (int d = 0; d < n; ++d) {
        Eigen::VectorXcd rho(n - d);
        for (int j = 0; j < n - d; ++j) rho(j) = std::conj(coeff(j)) * coeff(j + d);
        Eigen::VectorXcd v;
        if (materialized_) {
            v = blocks_[d] * rho.conjugate();
        } else {
            const Eigen::VectorXcd proj = node_factors_[d].transpose() * rho.conjugate();
            Eigen::VectorXcd scaled(proj.size());
            for (Eigen::Index m = 0; m < proj.size(); ++m) scaled(m) = node_omega_[m] * proj(m);
            v = node_factors_[d] * scaled;
        }
        // B_{j,j+d} = v_j;  (B c)_j += B_{j,j+d} c_{j+d},  (B c)_{j+d} += conj(B_{j,j+d}) c_j
        for (int j = 0; j < n - d; ++j) {
            out(j) += v(j) * coeff(j + d);
            if (d > 0) out(j + d) += std::conj(v(j)) * coeff(j);
        }
    }
    return out;
}

double gamma_functional(const CovarianceModel& model, const LandauBasis& basis,
                        const Eigen::VectorXcd& coeff) {
    if (std::fabs(coeff.norm() - 1.0) > 1e-10)
        throw DomainError("gamma_functional: coefficients must be unit norm");
    return CouplingTensor(model, basis).gamma_functional(coeff);
}

VariationalState gamma2_variational(const CovarianceModel& model, const LandauBasis& basis,
                                    int restarts, double tol, std::uint64_t seed) {
    if (restarts < 1) throw DomainError("gamma2_variational: restarts must be >= 1");
    if (!(tol > 0.0)) throw DomainError("gamma2_variational: tol must be > 0");
    const int n = basis.n;

    VariationalState best;
    best.coefficients = Eigen::VectorXcd::Zero(n);
    best.coefficients(0) = 1.0; // phi_{ell,-ell}

    // A vanishing band leaves no room for the decay energy: 0 <= Gamma^2 <= sigma^2.
    const double s2 = sigma2(model, basis);
    double s2_scale = 1.0;
    if (model.proper()) s2_scale = model.c_zero();
    else s2_scale = model.alpha2 * basis.B;
    if (s2 <= 1e-13 * s2_scale) {
        best.value = 0.0;
        best.converged = true;
        best.maximizer_overlap = 1.0;
        return best;
    }

    const CouplingTensor tensor(model, basis);
    constexpr int kMaxIter = 10000;
    int total_iters = 0;
    bool have_best = false;

    // The maximum can sit on a near-flat manifold (magnetic-translation
    // orbit of the maximizer), where random starts creep sublinearly.  A
    // restart that exhausts the cap is recorded as unconverged; the call
    // fails only if no restart converges.
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
        if (r == 0) {
            c(0) = 1.0; // phi_{ell,-ell}
        } else {
            CounterRng rng(seed, static_cast<std::uint64_t>(r), CounterRng::kVariational);
            for (int j = 0; j < n; ++j) c(j) = std::complex<double>(rng.next_normal(), rng.next_normal());
            c.normalize();
        }
        double value = tensor.gamma_functional(c);
        bool converged = false;
        int it = 0;
        for (; it < kMaxIter; ++it) {
            const Eigen::VectorXcd g = tensor.apply(c);
            Eigen::VectorXcd next = g;
            if (next.norm() == 0.0) { converged = true; break; } // functional identically zero
            next.normalize();
            double next_value = tensor.gamma_functional(next);
            // ridge shift keeps the ascent monotone if a plain step overshoots
            double shift = value;
            int guard = 0;
            while (next_value < value - 1e-13 * std::max(value, 1.0) && guard < 60) {
                next = g + shift * c;
                next.normalize();
                next_value = tensor.gamma_functional(next);
                shift *= 2.0;
                ++guard;
            }
            const double delta = next_value - value;
            c = next;
            value = next_value;
            if (std::fabs(delta) <= tol * std::max(value, 1e-300)) {
                converged = true;
                ++it;
                break;
            }
        }
        total_iters += it;
        if ((converged && (!have_best || value > best.value)) ||
            (!have_best && r == 0)) {
            best.value = value;
            best.coefficients = c;
            best.converged = converged;
            have_best = converged;
        }
    }
    if (!have_best)
        throw NonconvergenceError("gamma2_variational: no restart converged within the cap");
    best.iterations = total_iters;
    best.maximizer_overlap = std::abs(best.coefficients(0));
    return best;
}

} // namespace lldos
