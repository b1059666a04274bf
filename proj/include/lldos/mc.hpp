#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "lldos/bands.hpp"
#include "lldos/covariance.hpp"
#include "lldos/landau.hpp"

namespace lldos {

enum class SamplerKind { spectral_field, exact_matrix };

struct MatrixEnsembleSpec {
    LandauBasis basis;
    CovarianceModel model;
    SamplerKind sampler = SamplerKind::spectral_field;
    int modes = 4096; // spectral_field only
    int realizations = 400;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MatrixSample {
    Eigen::MatrixXcd entries; // Hermitian, <phi_j, V phi_k>
    int realization_index = 0;
    SamplerKind sampler_tag = SamplerKind::spectral_field;
};

// Reusable sampler state: mode-independent recurrence tables for the
// spectral field, tensor factorizations for the exact Gaussian sampler.
// Construction is single-threaded; sample() is const and thread-safe.
class MatrixSampler {
public:
    explicit MatrixSampler(const MatrixEnsembleSpec& spec);
    ~MatrixSampler();

    MatrixSample sample(int realization_index) const;
    // delta-correlated requests fall back to the small-tau gaussian
    // surrogate on the spectral path; this is what actually gets sampled
    const CovarianceModel& effective_model() const;
    const CouplingTensor* tensor() const; // exact path only, else nullptr

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrappers around MatrixSampler.
MatrixSample sample_field_matrix(const MatrixEnsembleSpec& spec, int realization_index);
MatrixSample sample_exact_matrix(const MatrixEnsembleSpec& spec, int realization_index);

// All eigenvalues, ascending.
std::vector<double> eigenvalues(const MatrixSample& sample);

// Binned estimate of the finite-n restricted density of states; every
// eigenvalue carries weight 1/(n R).  Bins are left-open: a value exactly on
// an edge goes to the lower bin.
struct DosHistogram {
    std::vector<double> bin_edges;        // bins + 1 edges
    std::vector<std::int64_t> counts;     // per bin, all realizations
    std::vector<double> density;          // counts / (n R width)
    std::vector<double> stderr_density;   // across-realization standard error
    int realizations = 0;
    int n = 0;
    double total_weight = 0.0;            // in-window mass, = 1 - overflow
    std::int64_t overflow_low = 0;
    std::int64_t overflow_high = 0;
    double mean = 0.0;                    // over all eigenvalues
    double second_moment = 0.0;

    double bin_width() const { return bin_edges.size() > 1 ? bin_edges[1] - bin_edges[0] : 0.0; }
    double overflow_fraction() const {
        const double tot = static_cast<double>(n) * realizations;
        return tot > 0 ? (overflow_low + overflow_high) / tot : 0.0;
    }
    double cdf_at_edge(std::size_t edge_index) const; // empirical CDF incl. low overflow
};

DosHistogram accumulate_dos(const MatrixEnsembleSpec& spec, double window_halfwidth, int bins,
                            int workers = 1, std::vector<double>* raw_eigenvalues = nullptr);

} // namespace lldos
