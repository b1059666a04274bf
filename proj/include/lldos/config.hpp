#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lldos/covariance.hpp"
#include "lldos/landau.hpp"
#include "lldos/mc.hpp"

namespace lldos {

// Experiment configuration: a flat, typed key-value file with sections
// mirroring the module blocks.  Unknown sections or keys are errors; silent
// typos in physics parameters are the main operator hazard.
struct ExperimentConfig {
    // [landau]
    double B = 1.0;
    int ell = 0;
    int n = 64;

    // [covariance]
    CovKind cov_kind = CovKind::gaussian;
    std::optional<double> c0;
    std::optional<double> tau;
    std::optional<double> alpha2;

    // [mu]
    MuKind mu_kind = MuKind::coherent_density;
    std::optional<int> mu_level; // defaults to ell
    std::vector<std::pair<double, double>> mu_table;

    // [mc]
    SamplerKind sampler = SamplerKind::spectral_field;
    int modes = 4096;
    int realizations = 400;
    std::uint64_t seed = 20011017ULL;
    double window_sigmas = 5.0;
    int bins = 201;

    // [gamma]
    int gamma_restarts = 8;
    double gamma_tol = 1e-10;
    int gamma_n = 32;

    // [report]
    double slack = 3.0; // stderr multiples granted to the domination check

    // [outputs]
    std::string out_dir = "out";
    bool raw_eigenvalues = false;

    CovarianceModel covariance() const;
    MuChoice mu() const;
    LandauBasis landau() const;
    MatrixEnsembleSpec ensemble() const;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: every key materialized, fixed order; parsing it
// back reproduces the struct exactly.
std::string serialize_config(const ExperimentConfig& config);

// Deterministic run identifier (hash of the canonical config), used to tag
// emitted files.
std::string run_id(const ExperimentConfig& config);

std::string artifact_version();

} // namespace lldos
