#include "lldos/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lldos/errors.hpp"

namespace lldos {

std::string artifact_version() { return "lldos 0.1.0"; }

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InvalidConfigError("bad numeric value for " + section + "." + key + ": '" + v + "'");
    }
}

int parse_int(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw InvalidConfigError("bad integer value for " + section + "." + key + ": '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InvalidConfigError("bad seed value for " + section + "." + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw InvalidConfigError("bad boolean for " + section + "." + key + ": '" + v + "'");
}

std::vector<std::pair<double, double>> parse_table(const std::string& v) {
    std::vector<std::pair<double, double>> table;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw InvalidConfigError("mu.table entries must look like radius:value");
        table.emplace_back(parse_double("mu", "table", trim(item.substr(0, colon))),
                           parse_double("mu", "table", trim(item.substr(colon + 1))));
    }
    return table;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const char* cov_kind_name(CovKind k) {
    switch (k) {
        case CovKind::constant: return "constant";
        case CovKind::gaussian: return "gaussian";
        case CovKind::bessel_oscillating: return "bessel_oscillating";
        case CovKind::poly_gaussian: return "poly_gaussian";
        case CovKind::delta_limit: return "delta_limit";
    }
    return "?";
}

const char* mu_kind_name(MuKind k) {
    switch (k) {
        case MuKind::point_mass: return "point_mass";
        case MuKind::coherent_density: return "coherent_density";
        case MuKind::maximizer_density: return "maximizer_density";
        case MuKind::custom_radial: return "custom_radial";
    }
    return "?";
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_cov_kind = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InvalidConfigError("line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known = {"landau", "covariance", "mu",
                                                        "mc",     "gamma",      "report",
                                                        "outputs"};
            if (!known.count(section))
                throw InvalidConfigError("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw InvalidConfigError("key '" + key + "' outside any section");
        if (!seen.insert(section + "." + key).second)
            throw InvalidConfigError("duplicate key " + section + "." + key);

        if (section == "landau") {
            if (key == "B") cfg.B = parse_double(section, key, value);
            else if (key == "ell") cfg.ell = parse_int(section, key, value);
            else if (key == "n") cfg.n = parse_int(section, key, value);
            else throw InvalidConfigError("unknown key landau." + key);
        } else if (section == "covariance") {
            if (key == "kind") {
                have_cov_kind = true;
                if (value == "constant") cfg.cov_kind = CovKind::constant;
                else if (value == "gaussian") cfg.cov_kind = CovKind::gaussian;
                else if (value == "bessel_oscillating") cfg.cov_kind = CovKind::bessel_oscillating;
                else if (value == "poly_gaussian") cfg.cov_kind = CovKind::poly_gaussian;
                else if (value == "delta_limit") cfg.cov_kind = CovKind::delta_limit;
                else throw InvalidConfigError("unknown covariance kind '" + value + "'");
            } else if (key == "c0") cfg.c0 = parse_double(section, key, value);
            else if (key == "tau") cfg.tau = parse_double(section, key, value);
            else if (key == "alpha2") cfg.alpha2 = parse_double(section, key, value);
            else throw InvalidConfigError("unknown key covariance." + key);
        } else if (section == "mu") {
            if (key == "kind") {
                if (value == "point_mass") cfg.mu_kind = MuKind::point_mass;
                else if (value == "coherent_density") cfg.mu_kind = MuKind::coherent_density;
                else if (value == "maximizer_density") cfg.mu_kind = MuKind::maximizer_density;
                else if (value == "custom_radial") cfg.mu_kind = MuKind::custom_radial;
                else throw InvalidConfigError("unknown mu kind '" + value + "'");
            } else if (key == "level") cfg.mu_level = parse_int(section, key, value);
            else if (key == "table") cfg.mu_table = parse_table(value);
            else throw InvalidConfigError("unknown key mu." + key);
        } else if (section == "mc") {
            if (key == "sampler") {
                if (value == "spectral_field") cfg.sampler = SamplerKind::spectral_field;
                else if (value == "exact_matrix") cfg.sampler = SamplerKind::exact_matrix;
                else throw InvalidConfigError("unknown sampler '" + value + "'");
            } else if (key == "modes") cfg.modes = parse_int(section, key, value);
            else if (key == "realizations") cfg.realizations = parse_int(section, key, value);
            else if (key == "seed") cfg.seed = parse_u64(section, key, value);
            else if (key == "window") cfg.window_sigmas = parse_double(section, key, value);
            else if (key == "bins") cfg.bins = parse_int(section, key, value);
            else throw InvalidConfigError("unknown key mc." + key);
        } else if (section == "gamma") {
            if (key == "restarts") cfg.gamma_restarts = parse_int(section, key, value);
            else if (key == "tol") cfg.gamma_tol = parse_double(section, key, value);
            else if (key == "n") cfg.gamma_n = parse_int(section, key, value);
            else throw InvalidConfigError("unknown key gamma." + key);
        } else if (section == "report") {
            if (key == "slack") cfg.slack = parse_double(section, key, value);
            else throw InvalidConfigError("unknown key report." + key);
        } else if (section == "outputs") {
            if (key == "dir") cfg.out_dir = value;
            else if (key == "raw_eigenvalues") cfg.raw_eigenvalues = parse_bool(section, key, value);
            else throw InvalidConfigError("unknown key outputs." + key);
        }
    }

    if (!have_cov_kind) throw InvalidConfigError("covariance.kind is required");
    // validate against the model constructors early
    (void)cfg.covariance();
    (void)cfg.landau();
    if (cfg.window_sigmas <= 0.0) throw InvalidConfigError("mc.window must be > 0");
    if (cfg.bins < 10) throw InvalidConfigError("mc.bins must be >= 10");
    if (cfg.mu_kind == MuKind::custom_radial && cfg.mu_table.empty())
        throw InvalidConfigError("mu.table is required for custom_radial");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

CovarianceModel ExperimentConfig::covariance() const {
    auto need = [&](const std::optional<double>& v, const char* key) {
        if (!v) throw InvalidConfigError(std::string("covariance.") + key + " is required");
        return *v;
    };
    switch (cov_kind) {
        case CovKind::constant: return CovarianceModel::constant(need(c0, "c0"));
        case CovKind::gaussian:
            return CovarianceModel::gaussian(need(c0, "c0"), need(tau, "tau"));
        case CovKind::bessel_oscillating:
            return CovarianceModel::bessel_oscillating(need(c0, "c0"), need(tau, "tau"));
        case CovKind::poly_gaussian:
            return CovarianceModel::poly_gaussian(need(c0, "c0"), need(tau, "tau"));
        case CovKind::delta_limit: return CovarianceModel::delta_limit(need(alpha2, "alpha2"));
    }
    throw InvalidConfigError("covariance.kind is required");
}

MuChoice ExperimentConfig::mu() const {
    MuChoice m;
    m.kind = mu_kind;
    m.level = mu_level.value_or(ell);
    m.table = mu_table;
    return m;
}

LandauBasis ExperimentConfig::landau() const { return LandauBasis(B, ell, n); }

MatrixEnsembleSpec ExperimentConfig::ensemble() const {
    MatrixEnsembleSpec spec{landau(), covariance()};
    spec.sampler = sampler;
    spec.modes = modes;
    spec.realizations = realizations;
    spec.seed = seed;
    return spec;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[landau]\n";
    out << "B = " << format_g17(c.B) << "\n";
    out << "ell = " << c.ell << "\n";
    out << "n = " << c.n << "\n\n";
    out << "[covariance]\n";
    out << "kind = " << cov_kind_name(c.cov_kind) << "\n";
    if (c.c0) out << "c0 = " << format_g17(*c.c0) << "\n";
    if (c.tau) out << "tau = " << format_g17(*c.tau) << "\n";
    if (c.alpha2) out << "alpha2 = " << format_g17(*c.alpha2) << "\n";
    out << "\n[mu]\n";
    out << "kind = " << mu_kind_name(c.mu_kind) << "\n";
    if (c.mu_level) out << "level = " << *c.mu_level << "\n";
    if (!c.mu_table.empty()) {
        out << "table = ";
        for (std::size_t i = 0; i < c.mu_table.size(); ++i) {
            if (i) out << ", ";
            out << format_g17(c.mu_table[i].first) << ":" << format_g17(c.mu_table[i].second);
        }
        out << "\n";
    }
    out << "\n[mc]\n";
    out << "sampler = "
        << (c.sampler == SamplerKind::spectral_field ? "spectral_field" : "exact_matrix") << "\n";
    out << "modes = " << c.modes << "\n";
    out << "realizations = " << c.realizations << "\n";
    out << "seed = " << c.seed << "\n";
    out << "window = " << format_g17(c.window_sigmas) << "\n";
    out << "bins = " << c.bins << "\n";
    out << "\n[gamma]\n";
    out << "restarts = " << c.gamma_restarts << "\n";
    out << "tol = " << format_g17(c.gamma_tol) << "\n";
    out << "n = " << c.gamma_n << "\n";
    out << "\n[report]\n";
    out << "slack = " << format_g17(c.slack) << "\n";
    out << "\n[outputs]\n";
    out << "dir = " << c.out_dir << "\n";
    out << "raw_eigenvalues = " << (c.raw_eigenvalues ? "true" : "false") << "\n";
    return out.str();
}

std::string run_id(const ExperimentConfig& config) {
    // identity covers the physics of the run, not where files land
    ExperimentConfig physics = config;
    physics.out_dir = "";
    physics.raw_eigenvalues = false;
    const std::string payload = artifact_version() + "\n" + serialize_config(physics);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : payload) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

} // namespace lldos
