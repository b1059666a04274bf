#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lldos/covariance.hpp"
#include "lldos/landau.hpp"

namespace lldos {

// Band statistics of the restricted density-of-states measure.
struct BandStatistics {
    double sigma2 = 0.0;
    double gamma2 = 0.0;
    enum class Method { closed_form, spectral_quadrature, variational };
    Method sigma2_method = Method::spectral_quadrature;
    Method gamma2_method = Method::closed_form;
};

// Variance sigma_ell^2 = int Ctilde(d^2k) e^{-t} L_ell(t)^2, t = |k|^2/(2B).
// Circle measures are evaluated exactly; radial densities by a scaled
// Gauss-Laguerre rule that integrates the polynomial part exactly.
double sigma2(const CovarianceModel& model, const LandauBasis& basis);

// Decay energy squared: closed forms for the gaussian covariance, its
// delta-correlated limit, and the spatially constant equality case.
double gamma2_closed_form(const CovarianceModel& model, double B, int ell);

// gamma^2(psi_{ell,0}) and gamma^2(phi_{ell,-ell}) by spectral quadrature.
double gamma2_coherent(const CovarianceModel& model, double B, int ell);
double gamma2_maximizer(const CovarianceModel& model, double B, int ell);

// Spectral discretization sum_m omega_m F(t_m) F'(t_m) of the pair
// correlations of matrix elements; shared by the coupling tensor and the
// exact matrix sampler.
struct SpectralNodes {
    std::vector<double> t;
    std::vector<double> omega;
};
SpectralNodes spectral_nodes(const CovarianceModel& model, double B, int degree_hint);

// E[V_{jk} conj(V_{j'k'})] for V_{jk} = <phi_j, V phi_k>.  The angular
// selection rule makes the tensor block-diagonal over d = k - j; blocks are
// materialized for n <= 64, larger n keep per-node factor tables and stream.
class CouplingTensor {
public:
    CouplingTensor(const CovarianceModel& model, const LandauBasis& basis);

    const LandauBasis& basis() const { return basis_; }
    bool materialized() const { return materialized_; }

    // block A_d, shape (n-d) x (n-d), indexed by the lower angular index
    const Eigen::MatrixXd& block(int d) const;
    double entry(int j, int k, int j2, int k2) const;

    // quartic functional gamma^2(phi) for unit coefficients over the basis
    double gamma_functional(const Eigen::VectorXcd& coeff) const;
    // gradient-type map: (B(c) c)_j with B(c)_{jk} = sum A_{jk,j'k'} c_{j'} conj(c_{k'})
    Eigen::VectorXcd apply(const Eigen::VectorXcd& coeff) const;

private:
    LandauBasis basis_;
    bool materialized_ = false;
    std::vector<Eigen::MatrixXd> blocks_;          // materialized path
    std::vector<Eigen::MatrixXd> node_factors_;    // streaming path: per d, (n-d) x nodes
    std::vector<double> node_omega_;
};

// Public quartic-functional evaluation (assembles a tensor per call; prefer
// holding a CouplingTensor when evaluating repeatedly).
double gamma_functional(const CovarianceModel& model, const LandauBasis& basis,
                        const Eigen::VectorXcd& coeff);

struct VariationalState {
    Eigen::VectorXcd coefficients;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    double maximizer_overlap = 0.0; // |<e_{-ell}, c>|
};

// Fixed-point ascent c <- normalize(B(c) c) for the constrained maximum of
// the quartic functional; best over restarts, monotone by construction
// (a ridge shift kicks in if a plain step would decrease the value).
VariationalState gamma2_variational(const CovarianceModel& model, const LandauBasis& basis,
                                    int restarts, double tol, std::uint64_t seed = 0x5eedULL);

} // namespace lldos
