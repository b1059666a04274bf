#include <doctest.h>

#include <cmath>
#include <complex>

#include "lldos/bands.hpp"
#include "lldos/errors.hpp"
#include "lldos/mc.hpp"

using namespace lldos;

namespace {

MatrixEnsembleSpec gaussian_spec(int ell, int n, int modes, int realizations,
                                 std::uint64_t seed, double tau = 1.0) {
    MatrixEnsembleSpec spec{LandauBasis(1.0, ell, n), CovarianceModel::gaussian(1.0, tau)};
    spec.modes = modes;
    spec.realizations = realizations;
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("spec validation") {
    auto spec = gaussian_spec(0, 128, 4096, 10, 1);
    spec.sampler = SamplerKind::exact_matrix;
    CHECK_THROWS_AS(spec.validate(), InvalidConfigError); // n > 64
    spec = gaussian_spec(0, 16, 128, 10, 1);
    CHECK_THROWS_AS(spec.validate(), InvalidConfigError); // too few modes
}

TEST_CASE("field sampler: constant covariance gives a random multiple of the identity") {
    MatrixEnsembleSpec spec{LandauBasis(1.0, 1, 6), CovarianceModel::constant(2.0)};
    spec.modes = 512;
    spec.realizations = 4;
    spec.seed = 5;
    const MatrixSampler sampler(spec);
    double second = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        const MatrixSample s = sampler.sample(r);
        const std::complex<double> lambda = s.entries(0, 0);
        CHECK(std::fabs(lambda.imag()) <= 1e-14);
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k)
                CHECK(std::abs(s.entries(j, k) - (j == k ? lambda : 0.0)) <= 1e-12);
        second += std::norm(lambda);
    }
    // E lambda^2 = C(0) exactly for any mode count
    CHECK(second / reps == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("field sampler: zero mean and exact second moments against the tensor") {
    auto spec = gaussian_spec(0, 8, 512, 6000, 424242);
    const MatrixSampler sampler(spec);
    const CouplingTensor tensor(spec.model, spec.basis);

    double mean_re = 0.0, m_00 = 0.0, m_03 = 0.0, m_27 = 0.0;
    for (int r = 0; r < spec.realizations; ++r) {
        const MatrixSample s = sampler.sample(r);
        mean_re += s.entries(1, 4).real();
        m_00 += std::norm(s.entries(0, 0));
        m_03 += std::norm(s.entries(0, 3));
        m_27 += std::norm(s.entries(2, 7));
    }
    const int R = spec.realizations;
    // E V_00^2 = gamma^2(phi_{0,0}) = C(0) B tau^2/(B tau^2 + 2) = 1/3 here
    const double a00 = tensor.entry(0, 0, 0, 0);
    CHECK(a00 == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(m_00 / R == doctest::Approx(a00).epsilon(3.0 * std::sqrt(2.0 / R) * 1.0));
    CHECK(m_03 / R ==
          doctest::Approx(tensor.entry(0, 3, 0, 3)).epsilon(3.0 * std::sqrt(2.0 / R)));
    CHECK(m_27 / R ==
          doctest::Approx(tensor.entry(2, 7, 2, 7)).epsilon(3.0 * std::sqrt(2.0 / R)));
    CHECK(std::fabs(mean_re / R) <= 3.0 * std::sqrt(tensor.entry(1, 4, 1, 4) / 2.0 / R));
}

TEST_CASE("exact sampler: entrywise covariance against the tensor and normality") {
    auto spec = gaussian_spec(1, 8, 512, 10000, 777);
    spec.sampler = SamplerKind::exact_matrix;
    const MatrixSampler sampler(spec);
    const CouplingTensor tensor(spec.model, spec.basis);

    const int R = spec.realizations;
    Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(8, 8);
    double v00_2 = 0.0, v00_4 = 0.0;
    Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(8, 8); // E V_{0k} conj(V_{1,k+1})
    for (int r = 0; r < R; ++r) {
        const MatrixSample s = sampler.sample(r);
        for (int j = 0; j < 8; ++j)
            for (int k = 0; k < 8; ++k) sum2(j, k) += std::norm(s.entries(j, k));
        const double x = s.entries(0, 0).real();
        v00_2 += x * x;
        v00_4 += x * x * x * x;
        for (int k = 0; k < 7; ++k) cross(0, k) += s.entries(0, k) * std::conj(s.entries(1, k + 1));
    }
    for (int j = 0; j < 8; ++j)
        for (int k = 0; k < 8; ++k) {
            const double want = tensor.entry(j, k, j, k);
            const double got = sum2(j, k) / R;
            const double se = std::sqrt(2.0 / R) * want; // gaussian fourth-moment scale
            CHECK(std::fabs(got - want) <= 4.0 * se + 1e-12);
        }
    // gaussian fourth moment: kurtosis 3 within statistical error
    const double kurt = (v00_4 / R) / std::pow(v00_2 / R, 2);
    CHECK(kurt == doctest::Approx(3.0).epsilon(0.25));
    // off-block correlations E V_{0k} conj(V_{1,k+1}) match the tensor too
    for (int k = 1; k < 6; ++k) {
        const double want = tensor.entry(0, k, 1, k + 1);
        const double se = std::sqrt(tensor.entry(0, k, 0, k) * tensor.entry(1, k + 1, 1, k + 1) / R);
        CHECK(std::fabs(cross(0, k).real() / R - want) <= 5.0 * se + 1e-12);
        CHECK(std::fabs(cross(0, k).imag() / R) <= 5.0 * se + 1e-12);
    }
}

TEST_CASE("exact sampler: oscillating covariance at the degenerate tuning gives the zero matrix") {
    MatrixEnsembleSpec spec{LandauBasis(1.0, 1, 16), CovarianceModel::bessel_oscillating(1.0, 1.0)};
    spec.sampler = SamplerKind::exact_matrix;
    spec.realizations = 8;
    spec.seed = 9;
    const MatrixSampler sampler(spec);
    double trace2 = 0.0;
    for (int r = 0; r < 8; ++r) {
        const MatrixSample s = sampler.sample(r);
        trace2 += (s.entries * s.entries).trace().real() / 16.0;
    }
    CHECK(std::fabs(trace2 / 8.0) <= 1e-8); // P_ell V P_ell = 0 at matrix level
}

TEST_CASE("eigenvalues: trivial spectra and similarity invariants") {
    MatrixSample zero;
    zero.entries = Eigen::MatrixXcd::Zero(5, 5);
    for (double e : eigenvalues(zero)) CHECK(e == 0.0);

    MatrixSample scalar;
    scalar.entries = 1.7 * Eigen::MatrixXcd::Identity(4, 4);
    for (double e : eigenvalues(scalar)) CHECK(e == doctest::Approx(1.7).epsilon(1e-14));

    auto spec = gaussian_spec(1, 12, 512, 2, 3);
    const MatrixSample s = MatrixSampler(spec).sample(0);
    const auto ev = eigenvalues(s);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    double tr = 0.0, tr2 = 0.0;
    for (double e : ev) {
        tr += e;
        tr2 += e * e;
    }
    CHECK(tr == doctest::Approx(s.entries.trace().real()).epsilon(1e-10));
    CHECK(tr2 == doctest::Approx((s.entries * s.entries).trace().real()).epsilon(1e-10));
}

TEST_CASE("accumulate_dos: identity ensemble reproduces the single-site gaussian") {
    MatrixEnsembleSpec spec{LandauBasis(1.0, 0, 4), CovarianceModel::constant(1.0)};
    spec.modes = 512;
    spec.realizations = 20000;
    spec.seed = 1234;
    const DosHistogram h = accumulate_dos(spec, 5.0, 81);
    CHECK(h.total_weight == doctest::Approx(1.0).epsilon(1e-3));
    // all eigenvalues coincide; the histogram approximates N(0, C(0))
    const double se_m2 = std::sqrt(2.0 / spec.realizations);
    CHECK(h.second_moment == doctest::Approx(1.0).epsilon(3.0 * se_m2));
    CHECK(std::fabs(h.mean) <= 4.0 / std::sqrt(static_cast<double>(spec.realizations)));
    double mass = 0.0;
    for (std::size_t b = 0; b < h.density.size(); ++b) mass += h.density[b] * h.bin_width();
    CHECK(mass + h.overflow_fraction() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("accumulate_dos: determinism and worker-count invariance of counts") {
    auto spec = gaussian_spec(0, 12, 512, 60, 2025);
    const DosHistogram a = accumulate_dos(spec, 4.0, 31);
    const DosHistogram b = accumulate_dos(spec, 4.0, 31);
    CHECK(a.counts == b.counts);
    CHECK(a.density == b.density);
    CHECK(a.stderr_density == b.stderr_density);
    CHECK(a.mean == b.mean);
    const DosHistogram c = accumulate_dos(spec, 4.0, 31, 3);
    CHECK(a.counts == c.counts); // per-realization streams are scheduling-free
    CHECK(a.overflow_low == c.overflow_low);
}

TEST_CASE("accumulate_dos: evenness of the averaged density within noise") {
    auto spec = gaussian_spec(0, 16, 512, 1500, 31415);
    const DosHistogram h = accumulate_dos(spec, 4.5, 61);
    const int bins = static_cast<int>(h.density.size());
    for (int b = 0; b < bins / 2; ++b) {
        const int m = bins - 1 - b;
        const double se = std::hypot(h.stderr_density[b], h.stderr_density[m]);
        if (se == 0.0) {
            CHECK(h.density[b] == h.density[m]);
        } else {
            CHECK(std::fabs(h.density[b] - h.density[m]) <= 5.0 * se);
        }
    }
}

TEST_CASE("sampler equivalence: spectral field vs exact sampler, small basis") {
    for (int ell : {0, 1}) {
        auto field_spec = gaussian_spec(ell, 16, 4096, 1200, 606060);
        auto exact_spec = field_spec;
        exact_spec.sampler = SamplerKind::exact_matrix;
        exact_spec.seed = 606061;
        const double s2 = sigma2(field_spec.model, field_spec.basis);
        const double window = 3.0 * std::sqrt(s2);
        const DosHistogram hf = accumulate_dos(field_spec, window, 41);
        const DosHistogram he = accumulate_dos(exact_spec, window, 41);
        for (int b = 0; b < 41; ++b) {
            const double se = std::hypot(hf.stderr_density[b], he.stderr_density[b]);
            CHECK(std::fabs(hf.density[b] - he.density[b]) <= 4.0 * se + 1e-9);
        }
    }
}

TEST_CASE("delta surrogate: level-independent width reproduced by the sampler") {
    MatrixEnsembleSpec spec{LandauBasis(1.0, 0, 24), CovarianceModel::delta_limit(2.0 * M_PI)};
    spec.modes = 1024;
    spec.realizations = 400;
    spec.seed = 8;
    const MatrixSampler sampler(spec);
    CHECK(sampler.effective_model().kind == CovKind::gaussian);
    CHECK(sampler.effective_model().tau * sampler.effective_model().tau ==
          doctest::Approx(0.01).epsilon(1e-12));
    double m2 = 0.0;
    for (int r = 0; r < spec.realizations; ++r) {
        const MatrixSample s = sampler.sample(r);
        m2 += std::norm(s.entries(0, 0));
    }
    // E V_00^2 = Gamma_0^2 of the surrogate ~ alpha^2 B/(4 pi) (1 + O(B tau^2))
    const double want = gamma2_closed_form(sampler.effective_model(), 1.0, 0);
    CHECK(m2 / spec.realizations == doctest::Approx(want).epsilon(0.2));
    CHECK(want == doctest::Approx(0.5).epsilon(0.01));
}
