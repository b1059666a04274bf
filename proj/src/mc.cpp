#include "lldos/mc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include "lldos/errors.hpp"
#include "lldos/rng.hpp"
#include "lldos/specfun.hpp"

namespace lldos {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::complex<double> ipow(int m) {
    switch (m & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Radial law of t = |q|^2/(2B) when wavevectors are drawn from Ctilde/C(0).
struct ModeLaw {
    enum class Kind { fixed, exponential, gamma_mixture } kind = Kind::exponential;
    double t_fixed = 0.0;
    double rate = 1.0; // exponential density rate * e^{-rate t}; mixtures use u = rate * t

    double draw(CounterRng& rng) const {
        switch (kind) {
            case Kind::fixed: return t_fixed;
            case Kind::exponential: return rng.next_exponential() / rate;
            case Kind::gamma_mixture: {
                // (1/8)(3 + 3u + u^2) e^{-u}: Gamma(1), Gamma(2), Gamma(3)
                // with weights 3/8, 3/8, 2/8
                const double v = rng.next_uniform();
                double u = rng.next_exponential();
                if (v >= 0.375) u += rng.next_exponential();
                if (v >= 0.75) u += rng.next_exponential();
                return u / rate;
            }
        }
        return 0.0;
    }
};

ModeLaw mode_law(const CovarianceModel& model, double B) {
    ModeLaw law;
    switch (model.kind) {
        case CovKind::constant:
            law.kind = ModeLaw::Kind::fixed;
            law.t_fixed = 0.0;
            break;
        case CovKind::bessel_oscillating:
            law.kind = ModeLaw::Kind::fixed;
            law.t_fixed = 1.0 / (B * model.tau * model.tau);
            break;
        case CovKind::gaussian:
            law.kind = ModeLaw::Kind::exponential;
            law.rate = B * model.tau * model.tau;
            break;
        case CovKind::poly_gaussian:
            law.kind = ModeLaw::Kind::gamma_mixture;
            law.rate = B * model.tau * model.tau;
            break;
        case CovKind::delta_limit:
            throw UnsupportedModelError("spectral sampler needs a proper spectral measure");
    }
    return law;
}

} // namespace

void MatrixEnsembleSpec::validate() const {
    if (realizations < 1) throw InvalidConfigError("realizations must be >= 1");
    if (sampler == SamplerKind::exact_matrix) {
        if (basis.n > 64) throw InvalidConfigError("exact_matrix sampler is limited to n <= 64");
    } else {
        if (modes < 256) throw InvalidConfigError("spectral_field sampler needs modes >= 256");
    }
}

struct MatrixSampler::Impl {
    explicit Impl(const MatrixEnsembleSpec& s) : spec(s), eff(s.model) {}

    MatrixEnsembleSpec spec;
    CovarianceModel eff; // proper model actually sampled on the field path

    // spectral-field machinery
    ModeLaw law;
    double amp = 0.0; // sqrt(2 C(0) / M)
    double sqrt_c0 = 0.0;
    std::vector<double> sq_ad;      // sqrt(a (a+d))
    std::vector<double> inv_sq;     // 1/sqrt((a+1)(a+1+d))
    std::vector<double> lg_half;    // 0.5 lgamma(d+1)
    std::vector<double> col_lg;     // 0.5 (lgamma(n) - lgamma(n-d))

    // exact-matrix machinery
    std::unique_ptr<CouplingTensor> tensor;
    std::vector<Eigen::MatrixXd> factors; // per-d square roots of A_d

    MatrixSample sample_field(int r) const;
    MatrixSample sample_exact(int r) const;
};

MatrixSampler::MatrixSampler(const MatrixEnsembleSpec& spec) : impl_(new Impl(spec)) {
    spec.validate();
    const int n = spec.basis.n;
    const double B = spec.basis.B;

    if (spec.sampler == SamplerKind::spectral_field) {
        // delta-correlated surrogate: gaussian with B tau^2 = 0.01 and the
        // matching white-noise strength C(0) = alpha^2/(2 pi tau^2)
        if (spec.model.kind == CovKind::delta_limit) {
            const double tau2 = 0.01 / B;
            impl_->eff = CovarianceModel::gaussian(spec.model.alpha2 / (2.0 * M_PI * tau2),
                                                   std::sqrt(tau2));
        } else {
            impl_->eff = spec.model;
        }
        impl_->law = mode_law(impl_->eff, B);
        impl_->amp = std::sqrt(2.0 * impl_->eff.c0 / spec.modes);
        impl_->sqrt_c0 = std::sqrt(impl_->eff.c0);
        impl_->sq_ad.resize(static_cast<std::size_t>(n) * n);
        impl_->inv_sq.resize(static_cast<std::size_t>(n) * n);
        impl_->lg_half.resize(n);
        impl_->col_lg.resize(n);
        for (int d = 0; d < n; ++d) {
            impl_->lg_half[d] = 0.5 * std::lgamma(d + 1.0);
            impl_->col_lg[d] = 0.5 * (std::lgamma(static_cast<double>(n)) -
                                      std::lgamma(static_cast<double>(n - d)));
            for (int a = 0; a < n - d; ++a) {
                impl_->sq_ad[static_cast<std::size_t>(d) * n + a] =
                    std::sqrt(static_cast<double>(a) * (a + d));
                impl_->inv_sq[static_cast<std::size_t>(d) * n + a] =
                    1.0 / std::sqrt(static_cast<double>(a + 1) * (a + 1 + d));
            }
        }
    } else {
        impl_->eff = spec.model;
        impl_->tensor = std::make_unique<CouplingTensor>(spec.model, spec.basis);
        // PSD square roots of the per-d blocks; Re and Im parts of each
        // off-diagonal stripe are independent with covariance A_d / 2
        double total_trace = 0.0;
        for (int d = 0; d < n; ++d)
            total_trace += impl_->tensor->block(d).trace() * (d == 0 ? 1.0 : 2.0);
        impl_->factors.resize(n);
        for (int d = 0; d < n; ++d) {
            const Eigen::MatrixXd& block = impl_->tensor->block(d);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
            if (es.info() != Eigen::Success)
                throw FactorizationError("exact sampler: eigendecomposition failed");
            Eigen::VectorXd lam = es.eigenvalues();
            for (int i = 0; i < lam.size(); ++i) {
                if (lam(i) < -1e-8 * std::max(total_trace, 1e-300))
                    throw FactorizationError("exact sampler: covariance indefinite beyond tolerance");
                lam(i) = std::sqrt(std::max(lam(i), 0.0));
            }
            impl_->factors[d] = es.eigenvectors() * lam.asDiagonal();
        }
    }
}

MatrixSampler::~MatrixSampler() = default;

const CovarianceModel& MatrixSampler::effective_model() const { return impl_->eff; }

const CouplingTensor* MatrixSampler::tensor() const { return impl_->tensor.get(); }

MatrixSample MatrixSampler::Impl::sample_field(int r) const {
    const int n = spec.basis.n;
    const int ell = spec.basis.ell;
    const int M = spec.modes;

    // Hermitian matrix stored as upper diagonals d = k - j >= 0
    std::vector<std::complex<double>> diag(static_cast<std::size_t>(n) * (n + 1) / 2,
                                           std::complex<double>(0.0, 0.0));
    std::vector<std::size_t> offset(n);
    for (int d = 0, off = 0; d < n; off += n - d, ++d) offset[d] = off;

    std::vector<std::complex<double>> ph(n);
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(r), CounterRng::kFieldModes);

    for (int m = 0; m < M; ++m) {
        const double t = law.draw(rng);
        const double theta_q = rng.next_angle();
        const double theta_m = rng.next_angle();

        const double lell = specfun::laguerre(ell, 0, t);
        if (lell == 0.0) continue;
        const double ln_cyc = -0.5 * t + std::log(std::fabs(lell));
        if (ln_cyc < -320.0) continue; // |F| <= e^{ln_cyc}, nothing to add
        const double cyc = (lell > 0 ? 1.0 : -1.0) * std::exp(ln_cyc);

        // ph[d] = amp * cyc * i^d e^{i d theta_q} * (cos theta_m | i sin theta_m)
        const double ct = std::cos(theta_m), st = std::sin(theta_m);
        const std::complex<double> rot(std::cos(theta_q), std::sin(theta_q));
        std::complex<double> cur(1.0, 0.0);
        for (int d = 0; d < n; ++d) {
            ph[d] = amp * cyc * ipow(d) * cur * ((d & 1) ? kI * st : std::complex<double>(ct, 0.0));
            cur *= rot;
        }

        const double log_t = (t > 0.0) ? std::log(t) : 0.0;
        for (int d = 0; d < n; ++d) {
            if (t == 0.0 && d > 0) break;
            // envelope at the top of the column; skip once provably negligible
            if (d > 0 && ln_cyc + 0.5 * d * log_t + col_lg[d] - lg_half[d] - 0.5 * t < -45.0)
                continue;
            const int len = n - d;
            const double w0 = (d == 0) ? std::exp(-0.5 * t)
                                       : std::exp(-0.5 * t + 0.5 * d * log_t - lg_half[d]);
            std::complex<double>* slot = diag.data() + offset[d];
            const std::complex<double> p = ph[d];
            const double* sq = sq_ad.data() + static_cast<std::size_t>(d) * n;
            const double* isq = inv_sq.data() + static_cast<std::size_t>(d) * n;
            double prev = 0.0, cur_w = w0;
            slot[0] += p * w0;
            for (int a = 1; a < len; ++a) {
                const double next = ((2.0 * (a - 1) + d + 1.0 - t) * cur_w - sq[a - 1] * prev) *
                                    isq[a - 1];
                prev = cur_w;
                cur_w = next;
                slot[a] += p * cur_w;
            }
        }
    }

    MatrixSample out;
    out.realization_index = r;
    out.sampler_tag = SamplerKind::spectral_field;
    out.entries.resize(n, n);
    for (int d = 0; d < n; ++d) {
        for (int j = 0; j < n - d; ++j) {
            const std::complex<double> v = diag[offset[d] + j];
            out.entries(j, j + d) = v;
            if (d > 0) out.entries(j + d, j) = std::conj(v);
        }
    }
    return out;
}

MatrixSample MatrixSampler::Impl::sample_exact(int r) const {
    const int n = spec.basis.n;
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(r), CounterRng::kExactNormals);

    MatrixSample out;
    out.realization_index = r;
    out.sampler_tag = SamplerKind::exact_matrix;
    out.entries.resize(n, n);

    for (int d = 0; d < n; ++d) {
        const int len = n - d;
        Eigen::VectorXd z1(len);
        for (int i = 0; i < len; ++i) z1(i) = rng.next_normal();
        if (d == 0) {
            const Eigen::VectorXd vals = factors[0] * z1;
            for (int j = 0; j < n; ++j) out.entries(j, j) = vals(j);
            continue;
        }
        Eigen::VectorXd z2(len);
        for (int i = 0; i < len; ++i) z2(i) = rng.next_normal();
        const Eigen::VectorXd re = factors[d] * z1 / std::sqrt(2.0);
        const Eigen::VectorXd im = factors[d] * z2 / std::sqrt(2.0);
        for (int j = 0; j < len; ++j) {
            const std::complex<double> v(re(j), im(j));
            out.entries(j, j + d) = v;
            out.entries(j + d, j) = std::conj(v);
        }
    }
    return out;
}

MatrixSample MatrixSampler::sample(int realization_index) const {
    return impl_->spec.sampler == SamplerKind::spectral_field
               ? impl_->sample_field(realization_index)
               : impl_->sample_exact(realization_index);
}

MatrixSample sample_field_matrix(const MatrixEnsembleSpec& spec, int realization_index) {
    if (spec.sampler != SamplerKind::spectral_field)
        throw InvalidConfigError("sample_field_matrix: spec selects a different sampler");
    return MatrixSampler(spec).sample(realization_index);
}

MatrixSample sample_exact_matrix(const MatrixEnsembleSpec& spec, int realization_index) {
    if (spec.sampler != SamplerKind::exact_matrix)
        throw InvalidConfigError("sample_exact_matrix: spec selects a different sampler");
    return MatrixSampler(spec).sample(realization_index);
}

std::vector<double> eigenvalues(const MatrixSample& sample) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sample.entries,
                                                       Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NonconvergenceError("eigensolver failed at realization " +
                                  std::to_string(sample.realization_index));
    const Eigen::VectorXd& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double DosHistogram::cdf_at_edge(std::size_t edge_index) const {
    const double tot = static_cast<double>(n) * realizations;
    double acc = static_cast<double>(overflow_low);
    for (std::size_t b = 0; b + 1 < edge_index + 1 && b < counts.size(); ++b)
        acc += static_cast<double>(counts[b]);
    return acc / tot;
}

namespace {

struct Partial {
    std::vector<std::int64_t> count_sum;
    std::vector<std::int64_t> count_sq;
    std::int64_t low = 0, high = 0;
    double sum = 0.0, sum2 = 0.0;
};

// left-open bins: value exactly on an edge belongs to the lower bin
int bin_index(double value, double lo, double width, int bins) {
    if (value <= lo) return -1;
    if (value > lo + bins * width) return bins;
    int idx = static_cast<int>(std::floor((value - lo) / width));
    idx = std::min(std::max(idx, 0), bins - 1);
    while (idx >= 0 && value <= lo + idx * width) --idx;
    while (idx < bins && value > lo + (idx + 1) * width) ++idx;
    return idx; // may be -1 (below) or bins (above)
}

} // namespace

DosHistogram accumulate_dos(const MatrixEnsembleSpec& spec, double window_halfwidth, int bins,
                            int workers, std::vector<double>* raw_eigenvalues) {
    if (spec.realizations < 2) throw InvalidConfigError("accumulate_dos: need realizations >= 2");
    if (bins < 10) throw InvalidConfigError("accumulate_dos: need bins >= 10");
    if (!(window_halfwidth > 0.0)) throw InvalidConfigError("accumulate_dos: bad window");

    const MatrixSampler sampler(spec);
    const int n = spec.basis.n;
    const int R = spec.realizations;
    const double lo = -window_halfwidth;
    const double width = 2.0 * window_halfwidth / bins;

    if (raw_eigenvalues) raw_eigenvalues->assign(static_cast<std::size_t>(R) * n, 0.0);

    const int nw = std::max(1, workers);
    std::vector<Partial> partials(nw);
    for (auto& p : partials) {
        p.count_sum.assign(bins, 0);
        p.count_sq.assign(bins, 0);
    }

    auto run_worker = [&](int w) {
        std::vector<std::int64_t> local(bins);
        for (int r = w; r < R; r += nw) {
            const MatrixSample sample = sampler.sample(r);
            const std::vector<double> ev = eigenvalues(sample);
            if (raw_eigenvalues)
                std::copy(ev.begin(), ev.end(),
                          raw_eigenvalues->begin() + static_cast<std::size_t>(r) * n);
            std::fill(local.begin(), local.end(), 0);
            Partial& p = partials[w];
            for (double e : ev) {
                p.sum += e;
                p.sum2 += e * e;
                const int idx = bin_index(e, lo, width, bins);
                if (idx < 0)
                    ++p.low;
                else if (idx >= bins)
                    ++p.high;
                else
                    ++local[idx];
            }
            for (int b = 0; b < bins; ++b) {
                p.count_sum[b] += local[b];
                p.count_sq[b] += local[b] * local[b];
            }
        }
    };

    if (nw == 1) {
        run_worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) pool.emplace_back(run_worker, w);
        for (auto& th : pool) th.join();
    }

    DosHistogram hist;
    hist.realizations = R;
    hist.n = n;
    hist.bin_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) hist.bin_edges[b] = lo + b * width;
    hist.counts.assign(bins, 0);
    std::vector<std::int64_t> sq(bins, 0);
    for (const auto& p : partials) {
        for (int b = 0; b < bins; ++b) {
            hist.counts[b] += p.count_sum[b];
            sq[b] += p.count_sq[b];
        }
        hist.overflow_low += p.low;
        hist.overflow_high += p.high;
        hist.mean += p.sum;
        hist.second_moment += p.sum2;
    }
    const double tot = static_cast<double>(n) * R;
    hist.mean /= tot;
    hist.second_moment /= tot;

    hist.density.resize(bins);
    hist.stderr_density.resize(bins);
    const double norm = 1.0 / (static_cast<double>(n) * width);
    for (int b = 0; b < bins; ++b) {
        const double mean_c = static_cast<double>(hist.counts[b]) / R;
        hist.density[b] = mean_c * norm;
        const double var_c =
            (static_cast<double>(sq[b]) - R * mean_c * mean_c) / std::max(R - 1, 1);
        hist.stderr_density[b] = std::sqrt(std::max(var_c, 0.0) / R) * norm;
    }
    hist.total_weight = 1.0 - hist.overflow_fraction();
    return hist;
}

} // namespace lldos
