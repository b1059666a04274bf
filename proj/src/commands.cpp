#include "lldos/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "lldos/bands.hpp"
#include "lldos/bounds.hpp"
#include "lldos/errors.hpp"
#include "lldos/mc.hpp"
#include "lldos/specfun.hpp"

namespace lldos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output dir " + dir.string() + ": " + ec.message());
    return dir;
}

std::vector<double> grid_centers(double halfwidth, int bins) {
    std::vector<double> centers(bins);
    const double w = 2.0 * halfwidth / bins;
    for (int b = 0; b < bins; ++b) centers[b] = -halfwidth + (b + 0.5) * w;
    return centers;
}

double band_sigma(const ExperimentConfig& cfg) {
    const double s2 = sigma2(cfg.covariance(), cfg.landau());
    const CovarianceModel model = cfg.covariance();
    const double scale = model.proper() ? model.c_zero() : model.alpha2 * cfg.B;
    if (s2 <= 1e-13 * scale)
        throw DegenerateBandError("band variance vanishes for this configuration");
    return std::sqrt(s2);
}

json derived_constants(const ExperimentConfig& cfg) {
    const CovarianceModel model = cfg.covariance();
    const LandauBasis basis = cfg.landau();
    json d;
    d["sigma2"] = sigma2(model, basis);
    d["s_ell_n"] = specfun::g_tail_integral(cfg.ell, cfg.n);
    switch (model.kind) {
        case CovKind::constant:
        case CovKind::gaussian:
        case CovKind::delta_limit:
            d["gamma2_closed_form"] = gamma2_closed_form(model, basis.B, basis.ell);
            break;
        default: break;
    }
    if (!model.proper()) d["sigma0_delta"] = std::sqrt(model.alpha2 * basis.B / (2.0 * M_PI));
    return d;
}

} // namespace

void cmd_bounds(const ExperimentConfig& cfg, int /*workers*/) {
    const fs::path dir = prepare_out_dir(cfg);
    const std::string id = run_id(cfg);
    const CovarianceModel model = cfg.covariance();
    const LandauBasis basis = cfg.landau();
    const MuChoice mu = cfg.mu();

    json summary;
    summary["run_id"] = id;
    summary["version"] = artifact_version();
    summary["derived"] = derived_constants(cfg);

    std::vector<std::pair<std::string, BoundCurve>> curves;
    if (model.proper()) {
        // surfaces the degenerate-band case first (Example-1 tuning)
        curves.emplace_back("gaussian_sigma", bound_gaussian_sigma(model, basis.B, basis.ell));
        curves.emplace_back("wegner_flat", bound_wegner_flat(model, mu, basis.B, basis.ell));
        curves.emplace_back("gaussian_cmu", bound_gaussian_cmu(model, mu, basis.B, basis.ell));
    }
    curves.emplace_back("gaussian_gamma", bound_gaussian_gamma(model, basis.B, basis.ell));

    for (const auto& [name, curve] : curves)
        for (const auto& [k, v] : curve.metadata) summary["derived"][name + "." + k] = v;

    const double sigma = band_sigma(cfg);
    const double halfwidth = cfg.window_sigmas * sigma;
    const std::vector<double> centers = grid_centers(halfwidth, cfg.bins);

    const bool with_refs = model.kind == CovKind::delta_limit;
    const double sigma0 = with_refs ? std::sqrt(model.alpha2 * basis.B / (2.0 * M_PI)) : 0.0;

    std::ostringstream csv;
    csv << "# run_id=" << id << " " << artifact_version() << "\n";
    csv << "E";
    std::vector<std::string> order;
    for (const auto& [name, curve] : curves) order.push_back(name);
    // canonical column order regardless of computation order
    std::sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
        static const std::map<std::string, int> rank = {{"wegner_flat", 0},
                                                        {"gaussian_cmu", 1},
                                                        {"gaussian_sigma", 2},
                                                        {"gaussian_gamma", 3}};
        return rank.at(a) < rank.at(b);
    });
    for (const auto& name : order) csv << "," << name;
    if (with_refs) csv << ",wegner_exact,semi_elliptic";
    csv << "\n";
    for (double e : centers) {
        csv << g17(e);
        for (const auto& name : order) {
            for (const auto& [n2, curve] : curves)
                if (n2 == name) csv << "," << g17(curve(e));
        }
        if (with_refs)
            csv << "," << g17(reference_wegner(sigma0, e)) << ","
                << g17(reference_semielliptic(sigma0, e));
        csv << "\n";
    }
    write_text(dir / "bounds.csv", csv.str());

    summary["window_halfwidth"] = halfwidth;
    summary["bins"] = cfg.bins;
    if (with_refs) summary["sigma0"] = sigma0;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
}

void cmd_simulate(const ExperimentConfig& cfg, int workers) {
    const fs::path dir = prepare_out_dir(cfg);
    const std::string id = run_id(cfg);
    const std::string started = timestamp_utc();

    const double sigma = band_sigma(cfg);
    const double halfwidth = cfg.window_sigmas * sigma;
    MatrixEnsembleSpec spec = cfg.ensemble();

    std::vector<double> raw;
    DosHistogram hist = accumulate_dos(spec, halfwidth, cfg.bins, workers,
                                       cfg.raw_eigenvalues ? &raw : nullptr);

    std::ostringstream csv;
    csv << "# run_id=" << id << " " << artifact_version() << "\n";
    csv << "E_center,density,stderr,counts\n";
    for (int b = 0; b < cfg.bins; ++b) {
        const double center = 0.5 * (hist.bin_edges[b] + hist.bin_edges[b + 1]);
        csv << g17(center) << "," << g17(hist.density[b]) << "," << g17(hist.stderr_density[b])
            << "," << hist.counts[b] << "\n";
    }
    write_text(dir / "dos_histogram.csv", csv.str());

    json manifest;
    manifest["run_id"] = id;
    manifest["version"] = artifact_version();
    manifest["config"] = serialize_config(cfg);
    manifest["seed"] = cfg.seed;
    manifest["workers"] = workers;
    manifest["timestamps"] = {{"started", started}, {"finished", timestamp_utc()}};
    manifest["derived"] = derived_constants(cfg);
    manifest["derived"]["window_halfwidth"] = halfwidth;
    manifest["results"] = {{"mean", hist.mean},
                           {"second_moment", hist.second_moment},
                           {"overflow_low", hist.overflow_low},
                           {"overflow_high", hist.overflow_high},
                           {"total_weight", hist.total_weight},
                           {"realizations", hist.realizations},
                           {"n", hist.n}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    if (cfg.raw_eigenvalues) {
        const fs::path binpath = dir / ("eigenvalues-" + id + ".bin");
        std::ofstream out(binpath, std::ios::binary);
        if (!out) throw IoError("cannot open " + binpath.string());
        const char magic[4] = {'L', 'L', 'E', 'V'};
        const std::uint32_t version = 1;
        const std::uint64_t n64 = cfg.n, r64 = cfg.realizations, seed = cfg.seed;
        out.write(magic, 4);
        out.write(reinterpret_cast<const char*>(&version), sizeof(version));
        out.write(reinterpret_cast<const char*>(&n64), sizeof(n64));
        out.write(reinterpret_cast<const char*>(&r64), sizeof(r64));
        out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size() * sizeof(double)));
        if (!out) throw IoError("write failed: " + binpath.string());
    }
}

void cmd_gamma(const ExperimentConfig& cfg, int /*workers*/) {
    const fs::path dir = prepare_out_dir(cfg);
    const CovarianceModel model = cfg.covariance();
    const LandauBasis basis(cfg.B, cfg.ell, cfg.gamma_n);

    const VariationalState state =
        gamma2_variational(model, basis, cfg.gamma_restarts, cfg.gamma_tol, cfg.seed);

    json out;
    out["run_id"] = run_id(cfg);
    out["version"] = artifact_version();
    out["value"] = state.value;
    out["iterations"] = state.iterations;
    out["restarts"] = cfg.gamma_restarts;
    out["converged"] = state.converged;
    out["maximizer_overlap"] = state.maximizer_overlap;
    out["n"] = cfg.gamma_n;

    switch (model.kind) {
        case CovKind::constant:
        case CovKind::gaussian:
        case CovKind::delta_limit: {
            const double closed = gamma2_closed_form(model, basis.B, basis.ell);
            out["closed_form"] = closed;
            out["relative_gap"] =
                closed != 0.0 ? std::fabs(state.value - closed) / std::fabs(closed) : 0.0;
            break;
        }
        default:
            out["closed_form"] = nullptr;
            out["relative_gap"] = nullptr;
            break;
    }

    const double s2 = sigma2(model, basis);
    out["sigma2"] = s2;
    json sandwich;
    sandwich["upper_sigma2"] = s2;
    sandwich["upper_ok"] = state.value <= s2 + 1e-8 * std::max(s2, 1.0);
    if (model.proper()) {
        const double lower = s2 * s2 / model.c_zero();
        sandwich["lower_sigma4_over_c0"] = lower;
        sandwich["lower_ok"] = state.value >= lower - 1e-8 * std::max(lower, 1.0);
    }
    out["sandwich"] = sandwich;
    write_text(dir / "gamma.json", out.dump(2) + "\n");
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing input: " + path.string());
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (table.header.empty()) {
            while (std::getline(ss, cell, ',')) table.header.push_back(cell);
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw IoError("empty csv: " + path.string());
    return table;
}

int column_of(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return static_cast<int>(i);
    return -1;
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot the joined report emitted next to this script."""
import csv
import collections
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "report_long.csv"
series = collections.defaultdict(lambda: ([], []))
with open(path) as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        xs, ys = series[row["series"]]
        xs.append(float(row["E"]))
        ys.append(float(row["value"]))

fig, ax = plt.subplots(figsize=(7, 4.5))
for name, (xs, ys) in sorted(series.items()):
    style = {"density": dict(lw=0, marker=".", ms=3)}.get(name, dict(lw=1.2))
    ax.plot(xs, ys, label=name, **style)
ax.set_xlabel("E")
ax.set_ylabel("density of states")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("report.png", dpi=150)
print("wrote report.png")
)PY";

} // namespace

void cmd_report(const ExperimentConfig& cfg, int /*workers*/) {
    const fs::path dir = prepare_out_dir(cfg);
    const std::string id = run_id(cfg);
    const CovarianceModel model = cfg.covariance();

    const CsvTable hist = read_csv(dir / "dos_histogram.csv");
    const CsvTable bounds = read_csv(dir / "bounds.csv");
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw IoError("missing input: " + (dir / "manifest.json").string());
    json manifest = json::parse(mf);

    const int bins = static_cast<int>(hist.rows.size());
    if (static_cast<int>(bounds.rows.size()) != bins)
        throw IoError("report: bounds.csv and dos_histogram.csv grids differ");

    const int ce = column_of(hist, "E_center"), cd = column_of(hist, "density"),
              cs = column_of(hist, "stderr"), cc = column_of(hist, "counts");
    if (ce < 0 || cd < 0 || cs < 0 || cc < 0) throw IoError("report: unexpected histogram header");

    const double n_total = manifest["results"]["n"].get<double>() *
                           manifest["results"]["realizations"].get<double>();
    const std::int64_t overflow_low = manifest["results"]["overflow_low"].get<std::int64_t>();

    const double s2_model = sigma2(model, cfg.landau());
    const double sigma = std::sqrt(s2_model);

    static const std::vector<std::string> kBoundNames = {"wegner_flat", "gaussian_cmu",
                                                         "gaussian_sigma", "gaussian_gamma"};
    json verdicts;
    for (const auto& name : kBoundNames) {
        const int col = column_of(bounds, name);
        if (col < 0) continue;
        bool pass = true;
        double worst_margin = std::numeric_limits<double>::infinity();
        double worst_e = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double margin = bounds.rows[b][col] + cfg.slack * hist.rows[b][cs] -
                                  hist.rows[b][cd];
            if (margin < worst_margin) {
                worst_margin = margin;
                worst_e = hist.rows[b][ce];
            }
            if (margin < 0.0) pass = false;
        }
        verdicts[name] = {{"pass", pass}, {"worst_margin", worst_margin}, {"worst_E", worst_e}};
    }

    // moments and evenness
    const double mean = manifest["results"]["mean"].get<double>();
    const double m2 = manifest["results"]["second_moment"].get<double>();
    double even_max_z = 0.0;
    int even_over_3 = 0;
    for (int b = 0; b < bins / 2; ++b) {
        const int mirror = bins - 1 - b;
        const double num = hist.rows[b][cd] - hist.rows[mirror][cd];
        const double den = std::hypot(hist.rows[b][cs], hist.rows[mirror][cs]);
        if (den == 0.0) continue;
        const double z = std::fabs(num) / den;
        even_max_z = std::max(even_max_z, z);
        if (z > 3.0) ++even_over_3;
    }

    json moments;
    moments["mean"] = mean;
    moments["mean_over_sigma"] = std::fabs(mean) / sigma;
    moments["second_moment"] = m2;
    moments["sigma2_model"] = s2_model;
    moments["second_moment_rel_diff"] = (m2 - s2_model) / s2_model;
    moments["evenness_max_z"] = even_max_z;
    moments["evenness_bins_over_3"] = even_over_3;

    // KS distances against the exact references in the delta-correlated case
    json ks = json::object();
    if (model.kind == CovKind::delta_limit) {
        const double sigma0 = std::sqrt(model.alpha2 * cfg.B / (2.0 * M_PI));
        double acc = static_cast<double>(overflow_low);
        double d_wegner = 0.0, d_semi = 0.0;
        for (int b = 0; b < bins; ++b) {
            acc += hist.rows[b][cc];
            const double edge = hist.rows[b][ce] + 0.5 * (hist.rows[1][ce] - hist.rows[0][ce]);
            const double emp = acc / n_total;
            d_wegner = std::max(d_wegner, std::fabs(emp - reference_wegner_cdf(sigma0, edge)));
            d_semi = std::max(d_semi, std::fabs(emp - reference_semielliptic_cdf(sigma0, edge)));
        }
        ks["wegner_exact"] = d_wegner;
        ks["semi_elliptic"] = d_semi;
        ks["sigma0"] = sigma0;
    }

    // joined wide CSV
    std::ostringstream wide;
    wide << "# run_id=" << id << " " << artifact_version() << "\n";
    wide << "E,density,stderr";
    std::vector<int> bound_cols;
    std::vector<std::string> bound_names;
    for (std::size_t i = 1; i < bounds.header.size(); ++i) {
        wide << "," << bounds.header[i];
        bound_cols.push_back(static_cast<int>(i));
        bound_names.push_back(bounds.header[i]);
    }
    wide << "\n";
    for (int b = 0; b < bins; ++b) {
        wide << g17(hist.rows[b][ce]) << "," << g17(hist.rows[b][cd]) << ","
             << g17(hist.rows[b][cs]);
        for (int col : bound_cols) wide << "," << g17(bounds.rows[b][col]);
        wide << "\n";
    }
    write_text(dir / "report.csv", wide.str());

    // long-format CSV for plotting
    std::ostringstream lf;
    lf << "# run_id=" << id << " " << artifact_version() << "\n";
    lf << "E,series,value\n";
    for (int b = 0; b < bins; ++b)
        lf << g17(hist.rows[b][ce]) << ",density," << g17(hist.rows[b][cd]) << "\n";
    for (std::size_t i = 0; i < bound_cols.size(); ++i)
        for (int b = 0; b < bins; ++b)
            lf << g17(hist.rows[b][ce]) << "," << bound_names[i] << ","
               << g17(bounds.rows[b][bound_cols[i]]) << "\n";
    write_text(dir / "report_long.csv", lf.str());
    write_text(dir / "plot_report.py", kPlotScript);

    json summary;
    summary["run_id"] = id;
    summary["version"] = artifact_version();
    summary["slack"] = cfg.slack;
    summary["domination"] = verdicts;
    summary["moments"] = moments;
    summary["ks"] = ks;
    summary["overflow_fraction"] =
        (manifest["results"]["overflow_low"].get<double>() +
         manifest["results"]["overflow_high"].get<double>()) /
        n_total;
    write_text(dir / "report_summary.json", summary.dump(2) + "\n");
}

ExperimentConfig apply_overrides(ExperimentConfig config, const CommandOptions& options) {
    if (options.out_dir) config.out_dir = *options.out_dir;
    if (options.seed) config.seed = *options.seed;
    return config;
}

int run_command(const std::string& name, const CommandOptions& options) {
    std::string out_dir = options.out_dir.value_or(".");
    try {
        ExperimentConfig cfg = apply_overrides(load_config(options.config_path), options);
        out_dir = cfg.out_dir;
        if (name == "bounds") cmd_bounds(cfg, options.workers);
        else if (name == "simulate") cmd_simulate(cfg, options.workers);
        else if (name == "gamma") cmd_gamma(cfg, options.workers);
        else if (name == "report") cmd_report(cfg, options.workers);
        else throw InvalidConfigError("unknown command: " + name);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
        try {
            json rec = {{"kind", e.kind()}, {"message", e.what()}, {"exit_code", e.exit_code()}};
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (!ec) write_text(fs::path(out_dir) / "error.json", rec.dump(2) + "\n");
        } catch (...) {}
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace lldos
