// Copyright 2026 The twirlbreak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scenario runners behind the twirlbreak command line. Each runner takes an
// ExperimentConfig, writes warnings to a diagnostic stream, and returns
// ResultRows; documents are assembled with nlohmann::json.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "twirlbreak/bipartite.hpp"
#include "twirlbreak/channel.hpp"
#include "twirlbreak/gaussian.hpp"
#include "twirlbreak/random.hpp"
#include "twirlbreak/states.hpp"
#include "twirlbreak/twirl.hpp"

namespace twirlbreak {

using json = nlohmann::json;

enum class Scenario { pauli, qudit_twirl, bosonic, eb_test, verify };

inline const char *scenario_name(Scenario s) {
    switch (s) {
        case Scenario::pauli:
            return "pauli";
        case Scenario::qudit_twirl:
            return "qudit-twirl";
        case Scenario::bosonic:
            return "bosonic";
        case Scenario::eb_test:
            return "eb-test";
        case Scenario::verify:
            return "verify";
    }
    return "?";
}

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline Scenario parse_scenario(const std::string &s) {
    for (Scenario sc : {Scenario::pauli, Scenario::qudit_twirl, Scenario::bosonic, Scenario::eb_test,
                        Scenario::verify}) {
        if (s == scenario_name(sc)) {
            return sc;
        }
    }
    throw ConfigError("unknown scenario '" + s + "'");
}

struct ExperimentConfig {
    Scenario scenario = Scenario::verify;
    json params = json::object();
    std::string output_path;
    std::string csv_path;
    /// Directory used to resolve relative paths inside params.
    std::string base_dir;

    bool has(const std::string &key) const { return params.contains(key) && !params.at(key).is_null(); }

    double get_double(const std::string &key, std::optional<double> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            throw ConfigError("missing parameter '" + key + "'");
        }
        const json &v = params.at(key);
        if (!v.is_number()) {
            throw ConfigError("parameter '" + key + "' must be a number");
        }
        return v.get<double>();
    }

    std::int64_t get_int(const std::string &key, std::optional<std::int64_t> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            throw ConfigError("missing parameter '" + key + "'");
        }
        const json &v = params.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError("parameter '" + key + "' must be an integer");
        }
        return v.get<std::int64_t>();
    }

    std::uint64_t get_seed() const {
        if (!has("seed")) {
            throw ConfigError("parameter 'seed' is required for randomized scenarios");
        }
        const json &v = params.at("seed");
        if (!v.is_number_integer()) {
            throw ConfigError("parameter 'seed' must be an integer");
        }
        return v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(v.get<std::int64_t>());
    }

    std::string get_string(const std::string &key, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            throw ConfigError("missing parameter '" + key + "'");
        }
        const json &v = params.at(key);
        if (!v.is_string()) {
            throw ConfigError("parameter '" + key + "' must be a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> get_grid(const std::string &key, std::optional<std::vector<double>> fallback = {}) const {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            throw ConfigError("missing parameter '" + key + "'");
        }
        const json &v = params.at(key);
        if (!v.is_array() || v.empty()) {
            throw ConfigError("parameter '" + key + "' must be a non-empty array of numbers");
        }
        std::vector<double> out;
        for (const auto &x : v) {
            if (!x.is_number()) {
                throw ConfigError("parameter '" + key + "' must contain only numbers");
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::size_t mc_samples() const {
        const auto n = get_int("mc_samples", 10000);
        if (n < 1) {
            throw ConfigError("mc_samples must be >= 1");
        }
        return static_cast<std::size_t>(n);
    }
};

inline ExperimentConfig load_config(Scenario scenario, const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    try {
        cfg.params = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.params.is_object()) {
        throw ConfigError("config '" + path + "' must be a JSON object");
    }
    if (cfg.params.contains("scenario")) {
        if (!cfg.params.at("scenario").is_string() || cfg.params.at("scenario").get<std::string>() != scenario_name(scenario)) {
            throw ConfigError(std::string("config scenario does not match requested scenario '") +
                              scenario_name(scenario) + "'");
        }
    }
    const auto slash = path.find_last_of('/');
    cfg.base_dir = slash == std::string::npos ? "" : path.substr(0, slash + 1);
    return cfg;
}

struct ResultRow {
    std::string scenario;
    json parameters = json::object();
    double single_transmission_negativity = 0;
    double double_transmission_negativity = 0;
    double invariance_residual = 0;
    std::string eb_verdict;
    json details = json::object();
};

inline json to_json(const ResultRow &r) {
    return json{{"scenario", r.scenario},
                {"parameters", r.parameters},
                {"single_transmission_negativity", r.single_transmission_negativity},
                {"double_transmission_negativity", r.double_transmission_negativity},
                {"invariance_residual", r.invariance_residual},
                {"eb_verdict", r.eb_verdict},
                {"details", r.details}};
}

inline std::string format_number(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

/// Flat CSV, one line per row, numbers with 17 significant digits.
inline std::string rows_to_csv(const std::vector<ResultRow> &rows) {
    std::ostringstream ss;
    ss << "scenario,parameters,single_transmission_negativity,double_transmission_negativity,"
          "invariance_residual,eb_verdict\n";
    for (const auto &r : rows) {
        std::string params = r.parameters.dump();
        std::string quoted;
        for (char c : params) {
            quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        ss << r.scenario << ",\"" << quoted << "\"," << format_number(r.single_transmission_negativity) << ","
           << format_number(r.double_transmission_negativity) << "," << format_number(r.invariance_residual) << ","
           << r.eb_verdict << "\n";
    }
    return ss.str();
}

inline json json_spectrum(const HermitianSpectrum &s) { return json(s.eigenvalues); }

inline ProbabilityVector config_probabilities(const ExperimentConfig &cfg, const std::string &key) {
    const auto p = cfg.get_grid(key);
    if (p.size() != 4) {
        throw ConfigError("parameter '" + key + "' must have 4 entries");
    }
    try {
        return ProbabilityVector(p);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("parameter '") + key + "': " + e.what());
    }
}

/// Werner states through the local depolarizing (single) and correlated
/// Pauli (double) environments.
inline std::vector<ResultRow> run_pauli_scenario(const ExperimentConfig &cfg, std::ostream &diag) {
    const ProbabilityVector p = config_probabilities(cfg, "p");
    const auto gammas = cfg.get_grid("gammas");
    const auto eb = is_entanglement_breaking(local_depolarizing(p, Side::A));
    if (p.max() > 0.5) {
        diag << "warning: max p_k = " << format_number(p.max())
             << " > 1/2, the single-transmission channel is not entanglement-breaking\n";
    }
    const KrausChannel single = local_depolarizing(p, Side::A);
    const KrausChannel dbl = correlated_pauli(p);
    std::vector<ResultRow> rows;
    for (double g : gammas) {
        WernerParamQubit wp = [&] {
            try {
                return WernerParamQubit(g);
            } catch (const std::invalid_argument &e) {
                throw ConfigError(e.what());
            }
        }();
        const DensityOperator rho = werner_qubit(wp);
        const DensityOperator out1 = apply_kraus(single, rho);
        const DensityOperator out2 = apply_kraus(dbl, rho);
        ResultRow row;
        row.scenario = "pauli";
        row.parameters = {{"p", p.values()}, {"gamma", g}};
        row.single_transmission_negativity = negativity(out1);
        row.double_transmission_negativity = negativity(out2);
        row.invariance_residual = frobenius_distance(out2.matrix(), rho.matrix());
        row.eb_verdict = eb.verdict;
        row.details = {{"input_negativity", negativity(rho)},
                       {"predicted_double_negativity", werner_qubit_negativity(wp)},
                       {"input_entangled", werner_qubit_entangled(wp)},
                       {"eb_witness", json_spectrum(eb.witness)}};
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Werner (uu) or isotropic (uustar) qudit states through the twirling
/// environment. d = 2 uses the Clifford design; d >= 3 uses the analytic
/// projectors with a Monte-Carlo Haar twirl as cross-check.
inline std::vector<ResultRow> run_qudit_scenario(const ExperimentConfig &cfg, std::ostream &diag) {
    const auto d64 = cfg.get_int("d");
    if (d64 < 2 || d64 > 8) {
        throw ConfigError("parameter 'd' must be in [2, 8]");
    }
    const int d = static_cast<int>(d64);
    const std::string mode_s = cfg.get_string("mode", "uu");
    if (mode_s != "uu" && mode_s != "uustar") {
        throw ConfigError("parameter 'mode' must be 'uu' or 'uustar'");
    }
    const TwirlMode mode = mode_s == "uu" ? TwirlMode::uu : TwirlMode::uustar;
    const auto grid = cfg.get_grid(mode == TwirlMode::uu ? "mus" : "gammas");
    const std::size_t n = cfg.mc_samples();
    const std::uint64_t seed = cfg.get_seed();
    const double tol = cfg.get_double("tol", 1e-11);
    const double mc_tol = cfg.has("tol") ? tol : 5.0 / std::sqrt(static_cast<double>(n));
    const Dims dims{static_cast<std::size_t>(d), static_cast<std::size_t>(d)};

    std::optional<UnitarySet> clifford;
    if (d == 2) {
        clifford = clifford_group_qubit();
    }

    std::vector<ResultRow> rows;
    for (std::size_t gi = 0; gi < grid.size(); gi++) {
        const double x = grid[gi];
        std::optional<DensityOperator> rho;
        bool entangled = false;
        try {
            if (mode == TwirlMode::uu) {
                WernerParamMulti wp(d, x);
                rho = werner_multi(wp);
                entangled = werner_multi_entangled(wp);
            } else {
                IsotropicParam ip(d, x);
                rho = isotropic(ip);
                entangled = isotropic_entangled(ip);
            }
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
        const ComplexMatrix exact = analytic_twirl(rho->matrix(), dims, mode);
        const ComplexMatrix exact_single = analytic_partial_twirl(rho->matrix(), dims, Side::A);
        DensityOperator out2 = clifford ? DensityOperator(twirl(rho->matrix(), dims, mode, *clifford), dims)
                                        : DensityOperator(exact, dims);
        DensityOperator out1 = clifford ? partial_twirl(*rho, Side::A, *clifford) : DensityOperator(exact_single, dims);

        // Each grid point gets its own stream derived from the seed.
        HaarSampler sampler(seed + gi, d);
        const DensityOperator mc = mc_twirl(*rho, mode, n, sampler);
        const double mc_residual = frobenius_distance(mc.matrix(), exact);

        ResultRow row;
        row.scenario = "qudit-twirl";
        row.parameters = {{"d", d}, {"mode", mode_s}, {mode == TwirlMode::uu ? "mu" : "gamma", x}};
        row.single_transmission_negativity = negativity(out1);
        row.double_transmission_negativity = negativity(out2);
        row.invariance_residual = frobenius_distance(out2.matrix(), rho->matrix());
        const double prod = product_residual(out1);
        if (prod <= 1e-12) {
            row.eb_verdict = "separable (product form)";
        } else if (d == 2) {
            row.eb_verdict = is_ppt(out1) ? "EB" : "NOT-EB";
        } else {
            row.eb_verdict = is_ppt(out1) ? "PPT" : "NPT";
        }
        row.details = {{"input_entangled", entangled},
                       {"input_negativity", negativity(*rho)},
                       {"single_product_residual", prod},
                       {"single_distance_to_reduced", frobenius_distance(out1.matrix(), exact_single)},
                       {"mc_samples", n},
                       {"mc_residual", mc_residual},
                       {"mc_tolerance", mc_tol},
                       {"double_verdict", d == 2 ? (is_ppt(out2) ? "separable" : "entangled")
                                                 : (is_ppt(out2) ? "PPT" : "NPT")}};
        if (clifford) {
            row.details["design"] = "clifford-24";
            row.details["design_vs_analytic"] = frobenius_distance(out2.matrix(), exact);
        } else {
            row.details["design"] = "analytic";
        }
        if (mc_residual > mc_tol) {
            diag << "warning: Monte-Carlo twirl residual " << format_number(mc_residual) << " exceeds "
                 << format_number(mc_tol) << " at grid point " << gi << "\n";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Gaussian negativity (1/ν̃ - 1)/2 for the smallest PT symplectic eigenvalue ν̃ < 1.
inline double gaussian_negativity(double nu_pt_min) { return nu_pt_min >= 1.0 ? 0.0 : (1.0 / nu_pt_min - 1.0) / 2.0; }

/// EPR states through anticorrelated rotations (double) and the uniform
/// dephasing of one mode in a truncated Fock space (single), plus a sweep of
/// the correlated-rotation invariant family.
inline std::vector<ResultRow> run_bosonic_scenario(const ExperimentConfig &cfg, std::ostream &diag) {
    const auto mus = cfg.get_grid("mus");
    const auto cutoff64 = cfg.get_int("fock_cutoff", 8);
    if (cutoff64 < 2 || cutoff64 > 16) {
        throw ConfigError("fock_cutoff must be in [2, 16]");
    }
    const auto cutoff = static_cast<std::size_t>(cutoff64);
    const auto n_angles = cfg.get_int("angles", 32);
    if (n_angles < 1) {
        throw ConfigError("angles must be >= 1");
    }
    const double tol = cfg.get_double("tol", 1e-12);
    const auto angles = uniform_angles(static_cast<std::size_t>(n_angles));

    std::vector<ResultRow> rows;
    for (double mu : mus) {
        if (!(mu >= 1.0)) {
            throw ConfigError("every entry of 'mus' must be >= 1");
        }
        const CovarianceMatrix v = epr_cm(mu);
        const double residual = invariance_residual(v.matrix(), RotationCorrelation::anticorrelated, angles);
        const auto nu_pt = pt_symplectic_eigenvalues(v);

        const double lambda = squeezing_lambda(mu);
        const double tail = fock_tail_mass(lambda, cutoff);
        if (tail > 1e-6) {
            diag << "warning: mu = " << format_number(mu) << " leaves Fock tail mass " << format_number(tail)
                 << " beyond cutoff " << cutoff << " (guard 1e-6); the truncated state is renormalized\n";
        }
        const TruncatedFockState fock = truncated_two_mode_squeezed(lambda, cutoff);
        const TruncatedFockState dephased = dephase_truncated(fock, Side::A);
        const double min_pt = pt_spectrum(dephased.rho()).min();

        ResultRow row;
        row.scenario = "bosonic";
        row.parameters = {{"mu", mu}, {"fock_cutoff", cutoff}, {"rotation", "anticorrelated"}};
        row.single_transmission_negativity = negativity(dephased.rho());
        row.double_transmission_negativity = gaussian_negativity(nu_pt.first);
        row.invariance_residual = residual;
        row.eb_verdict = min_pt >= -kPsdTol ? "EB (dephased output PPT)" : "NPT";
        row.details = {{"pt_symplectic_eigenvalues", {nu_pt.first, nu_pt.second}},
                       {"closed_form_min_pt_eigenvalue", mu - std::sqrt(mu * mu - 1.0)},
                       {"dephased_min_pt_eigenvalue", min_pt},
                       {"input_fock_negativity", negativity(fock.rho())},
                       {"fock_tail_mass", tail},
                       {"squeezing_lambda", lambda}};
        if (residual > tol) {
            diag << "warning: EPR invariance residual " << format_number(residual) << " exceeds "
                 << format_number(tol) << "\n";
        }
        rows.push_back(std::move(row));
    }

    const auto per_axis = cfg.get_int("sweep_points", 10);
    if (per_axis < 1) {
        throw ConfigError("sweep_points must be >= 1");
    }
    const InvariantFamily fam = solve_invariant_cm(RotationCorrelation::correlated);
    const CorrelatedSweep sweep = sweep_correlated_family(static_cast<std::size_t>(per_axis));
    ResultRow row;
    row.scenario = "bosonic";
    row.parameters = {{"rotation", "correlated"}, {"sweep_points_per_axis", per_axis}};
    row.single_transmission_negativity = 0;
    row.double_transmission_negativity = gaussian_negativity(sweep.min_pt_eigenvalue);
    row.invariance_residual = 0;
    for (const auto &b : fam.basis) {
        row.invariance_residual =
            std::max(row.invariance_residual, invariance_residual(b, RotationCorrelation::correlated, angles));
    }
    row.eb_verdict = sweep.separable == sweep.bona_fide ? "all invariant states separable" : "entangled point found";
    row.details = {{"family_dimension", fam.dimension()},
                   {"grid_points", sweep.points},
                   {"bona_fide_points", sweep.bona_fide},
                   {"separable_points", sweep.separable},
                   {"min_pt_symplectic_eigenvalue", sweep.min_pt_eigenvalue}};
    rows.push_back(std::move(row));
    return rows;
}

// ---------------------------------------------------------------------------
// Channel description documents:
//   {"pauli_p": [p0, p1, p2, p3]}  or  {"kraus": [M0, M1, ...]}
// where each matrix is row-major: a list of rows, each a list of [re, im].

inline ComplexMatrix parse_complex_matrix(const json &j) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError("kraus matrix must be a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).is_array() ? j.at(0).size() : 0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; r++) {
        const json &row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError("kraus matrix rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; c++) {
            const json &z = row.at(static_cast<std::size_t>(c));
            if (!z.is_array() || z.size() != 2 || !z.at(0).is_number() || !z.at(1).is_number()) {
                throw ConfigError("kraus matrix entries must be [re, im] pairs");
            }
            m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
        }
    }
    return m;
}

inline json complex_matrix_to_json(const ComplexMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Single-system channel from a description document.
inline KrausChannel parse_channel(const json &doc) {
    if (!doc.is_object()) {
        throw ConfigError("channel description must be a JSON object");
    }
    if (doc.contains("pauli_p")) {
        const json &p = doc.at("pauli_p");
        if (!p.is_array() || p.size() != 4) {
            throw ConfigError("pauli_p must be an array of 4 probabilities");
        }
        std::vector<double> v;
        for (const auto &x : p) {
            if (!x.is_number()) {
                throw ConfigError("pauli_p entries must be numbers");
            }
            v.push_back(x.get<double>());
        }
        try {
            return pauli_channel(ProbabilityVector(v));
        } catch (const std::invalid_argument &e) {
            throw ConfigError(std::string("pauli_p: ") + e.what());
        }
    }
    if (doc.contains("kraus")) {
        const json &ks = doc.at("kraus");
        if (!ks.is_array() || ks.empty()) {
            throw ConfigError("kraus must be a non-empty array of matrices");
        }
        std::vector<ComplexMatrix> ops;
        for (const auto &k : ks) {
            ops.push_back(parse_complex_matrix(k));
        }
        const auto d = ops.front().rows();
        for (const auto &k : ops) {
            if (k.rows() != d || k.cols() != d) {
                throw ConfigError("kraus operators must all be square with the same size");
            }
        }
        const double residual = KrausChannel::completeness_residual(ops);
        if (residual > kCompletenessTol) {
            std::ostringstream ss;
            ss << "kraus operators violate completeness: max |sum K^dag K - I| = " << format_number(residual)
               << " (tolerance " << kCompletenessTol << ")";
            throw ConfigError(ss.str());
        }
        return KrausChannel(std::move(ops), static_cast<std::size_t>(d));
    }
    throw ConfigError("channel description needs a 'pauli_p' or 'kraus' key");
}

inline json channel_to_json(const KrausChannel &ch) {
    json ks = json::array();
    for (const auto &k : ch.operators()) {
        ks.push_back(complex_matrix_to_json(k));
    }
    return json{{"kraus", ks}};
}

inline KrausChannel load_channel(const ExperimentConfig &cfg) {
    if (cfg.has("channel")) {
        return parse_channel(cfg.params.at("channel"));
    }
    std::string path = cfg.get_string("channel_file");
    if (!path.empty() && path.front() != '/') {
        path = cfg.base_dir + path;
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open channel file '" + path + "'");
    }
    try {
        return parse_channel(json::parse(in));
    } catch (const json::parse_error &e) {
        throw ConfigError("channel file '" + path + "' is not valid JSON: " + e.what());
    }
}

inline ResultRow run_eb_test(const ExperimentConfig &cfg, std::ostream &) {
    const KrausChannel ch = load_channel(cfg);
    const double tol = cfg.get_double("tol", kPsdTol);
    if (!(tol > 0)) {
        throw ConfigError("tol must be positive");
    }
    const auto report = is_entanglement_breaking(ch, tol);
    ResultRow row;
    row.scenario = "eb-test";
    row.parameters = {{"d", ch.dim()}, {"kraus_operators", ch.operators().size()}, {"tol", tol}};
    row.single_transmission_negativity = negativity(report.choi, tol);
    row.double_transmission_negativity = 0;
    row.invariance_residual = 0;
    row.eb_verdict = report.verdict;
    row.details = {{"witness", json_spectrum(report.witness)},
                   {"conclusive", report.conclusive},
                   {"choi_product_residual", product_residual(report.choi)}};
    return row;
}

// ---------------------------------------------------------------------------
// Verification suites

struct SuiteResult {
    std::string name;
    bool passed = false;
    double max_residual = 0;
    double tolerance = 0;
    bool monte_carlo = false;
};

inline json to_json(const SuiteResult &s) {
    return json{{"suite", s.name},
                {"passed", s.passed},
                {"max_residual", s.max_residual},
                {"tolerance", s.tolerance},
                {"monte_carlo", s.monte_carlo}};
}

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t mc_samples = 10000;
    /// Overrides every suite tolerance when set.
    std::optional<double> tol;
    std::size_t fock_cutoff = 8;
};

namespace detail {

inline SuiteResult make_suite(std::string name, double residual, double default_tol, const VerifyOptions &opt,
                              bool mc = false) {
    const double tol = opt.tol.value_or(default_tol);
    return {std::move(name), residual <= tol, residual, tol, mc};
}

}  // namespace detail

/// Runs the invariant suites. Residuals are maxima over all checked
/// instances; boolean properties report 0 on success and 1 on failure.
inline std::vector<SuiteResult> run_verify_suites(const VerifyOptions &opt) {
    std::vector<SuiteResult> out;
    GaussianStream g(opt.seed);
    const double mc_tol = 5.0 / std::sqrt(static_cast<double>(opt.mc_samples));

    {
        double r = 0;
        for (int t = 0; t < 20; t++) {
            const DensityOperator rho = random_density_operator(g, 2, 3);
            const ComplexMatrix pt = partial_transpose(rho);
            r = std::max(r, frobenius_distance(partial_transpose(pt, rho.dims()), rho.matrix()));
            r = std::max(r, std::abs(pt.trace() - 1.0));
            r = std::max(r, std::abs(partial_trace(rho, Side::A).matrix().trace() - 1.0));
            r = std::max(r, std::abs(partial_trace(rho, Side::B).matrix().trace() - 1.0));
            const bool consistent = (negativity(rho) == 0.0) == is_ppt(rho);
            r = std::max(r, consistent ? 0.0 : 1.0);
        }
        out.push_back(detail::make_suite("bipartite-core: trace, PT involution, negativity/PPT", r, 1e-12, opt));
    }
    {
        double r = 0;
        HaarSampler hs(opt.seed + 1, 2);
        for (double gamma : {-1.0 / 3.0, 0.0, 0.5, 1.0}) {
            const DensityOperator rho = werner_qubit(WernerParamQubit(gamma));
            for (int t = 0; t < 100; t++) {
                const ComplexMatrix u = haar_sample(hs);
                const ComplexMatrix w = kron(u, u);
                r = std::max(r, frobenius_distance(w * rho.matrix() * w.adjoint(), rho.matrix()));
            }
        }
        out.push_back(detail::make_suite("state-families: qubit Werner U⊗U invariance", r, 1e-12, opt));
    }
    {
        double r = 0;
        for (int i = 0; i < 50; i++) {
            const double gamma = -1.0 / 3.0 + (4.0 / 3.0) * i / 49.0;
            const WernerParamQubit wp(gamma);
            r = std::max(r, std::abs(negativity(werner_qubit(wp)) - werner_qubit_negativity(wp)));
        }
        out.push_back(detail::make_suite("state-families: Werner negativity closed form", r, 1e-10, opt));
    }
    {
        int mismatches = 0;
        double witness = 0;
        for (int t = 0; t < 200; t++) {
            std::vector<double> p(4);
            double s = 0;
            for (auto &x : p) {
                x = -std::log(g.uniform());
                s += x;
            }
            for (auto &x : p) {
                x /= s;
            }
            const ProbabilityVector pv(p);
            const auto rep = is_entanglement_breaking(local_depolarizing(pv, Side::A));
            if (rep.ppt != (pv.max() <= 0.5 + 1e-12)) {
                mismatches++;
            }
            std::vector<double> expect;
            for (double x : p) {
                expect.push_back(0.5 - x);
            }
            std::sort(expect.begin(), expect.end());
            for (std::size_t k = 0; k < 4; k++) {
                witness = std::max(witness, std::abs(expect[k] - rep.witness.eigenvalues[k]));
            }
        }
        out.push_back(detail::make_suite("channel-engine: EB threshold max p_k <= 1/2", mismatches + witness, 1e-10,
                                         opt));
    }
    {
        double r = 0;
        const ProbabilityVector p({0.4, 0.3, 0.2, 0.1});
        const DilatedChannel dc = build_pauli_dilation(p);
        const KrausChannel kc = correlated_pauli(p);
        const UnitarySet cliff = clifford_group_qubit();
        const DilatedChannel tdc = build_twirl_dilation(cliff, TwirlMode::uu);
        const KrausChannel tkc = twirl_channel(cliff, TwirlMode::uu, Dims{2, 2});
        for (int t = 0; t < 20; t++) {
            const DensityOperator rho = random_density_operator(g, 2, 2);
            r = std::max(r, frobenius_distance(apply_dilation(dc, rho).matrix(), apply_kraus(kc, rho).matrix()));
            r = std::max(r, frobenius_distance(apply_dilation(tdc, rho).matrix(), apply_kraus(tkc, rho).matrix()));
        }
        const bool classical = env_is_classical(dc.env_state()) && env_is_classical(tdc.env_state());
        r = std::max(r, classical ? 0.0 : 1.0);
        out.push_back(detail::make_suite("channel-engine: dilation reproduces Kraus action", r, 1e-11, opt));
    }
    {
        double r = 0;
        const ProbabilityVector p({0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0});
        for (double gamma : {0.4, 0.6, 0.9}) {
            const WernerParamQubit wp(gamma);
            const DensityOperator rho = werner_qubit(wp);
            r = std::max(r, negativity(apply_kraus(local_depolarizing(p, Side::A), rho)));
            const DensityOperator out2 = apply_kraus(correlated_pauli(p), rho);
            r = std::max(r, frobenius_distance(out2.matrix(), rho.matrix()));
            r = std::max(r, std::abs(negativity(out2) - werner_qubit_negativity(wp)));
        }
        out.push_back(detail::make_suite("channel-engine: single breaks, double preserves", r, 1e-12, opt));
    }
    {
        const DesignCheck c = check_2design(clifford_group_qubit());
        const double r = std::max(c.partial_twirl_residual, c.span_residual);
        out.push_back(detail::make_suite("design-twirl: Clifford set is a 2-design", r, 1e-11, opt));
    }
    {
        double r = 0;
        const UnitarySet cliff = clifford_group_qubit();
        const Dims dims{2, 2};
        for (int t = 0; t < 50; t++) {
            const ComplexMatrix h = random_hermitian_unit_trace(g, 4);
            const ComplexMatrix lhs = twirl(h, dims, TwirlMode::uustar, cliff);
            const ComplexMatrix rhs =
                partial_transpose(twirl(partial_transpose(h, dims), dims, TwirlMode::uu, cliff), dims);
            r = std::max(r, frobenius_distance(lhs, rhs));
        }
        out.push_back(detail::make_suite("design-twirl: U⊗U* twirl = PT∘(U⊗U twirl)∘PT", r, 1e-11, opt));
    }
    {
        double r = 0;
        for (int d : {3, 4}) {
            const DensityOperator w = werner_multi(WernerParamMulti(d, -0.9));
            const DensityOperator iso = isotropic(IsotropicParam(d, 0.8));
            HaarSampler s1(opt.seed + 10 + static_cast<std::uint64_t>(d), d);
            r = std::max(r, frobenius_distance(mc_twirl(w, TwirlMode::uu, opt.mc_samples, s1).matrix(), w.matrix()));
            HaarSampler s2(opt.seed + 20 + static_cast<std::uint64_t>(d), d);
            r = std::max(r,
                         frobenius_distance(mc_twirl(iso, TwirlMode::uustar, opt.mc_samples, s2).matrix(), iso.matrix()));
        }
        out.push_back(detail::make_suite("design-twirl: Monte-Carlo twirl fixes Werner/isotropic", r, mc_tol, opt, true));
    }
    {
        double r = 0;
        const Dims dims{3, 2};
        HaarSampler s(opt.seed + 30, 3);
        const UnitarySet samples = haar_unitary_set(s, opt.mc_samples);
        for (int t = 0; t < 5; t++) {
            const ComplexMatrix x = ginibre(g, 6, 6);
            const ComplexMatrix tw = partial_twirl(x, dims, Side::A, samples);
            r = std::max(r, frobenius_distance(tw, analytic_partial_twirl(x, dims, Side::A)) / x.norm());
        }
        out.push_back(detail::make_suite("design-twirl: Monte-Carlo partial twirl = I/d ⊗ Tr_A", r, mc_tol, opt, true));
    }
    {
        double r = 0;
        const auto angles = uniform_angles(32);
        for (double mu : {1.0, 1.5, 2.0, 5.0}) {
            const CovarianceMatrix v = epr_cm(mu);
            r = std::max(r, invariance_residual(v.matrix(), RotationCorrelation::anticorrelated, angles));
            r = std::max(r, std::abs(pt_symplectic_eigenvalues(v).first - (mu - std::sqrt(mu * mu - 1.0))));
        }
        out.push_back(detail::make_suite("gaussian-cv: EPR anticorrelated invariance", r, 1e-10, opt));
    }
    {
        const InvariantFamily fam = solve_invariant_cm(RotationCorrelation::correlated);
        const CorrelatedSweep sw = sweep_correlated_family(10);
        double r = fam.dimension() == 4 ? 0.0 : 1.0;
        r = std::max(r, sw.separable == sw.bona_fide && sw.bona_fide > 0 ? 0.0 : 1.0);
        out.push_back(detail::make_suite("gaussian-cv: correlated invariant family separable", r, 1e-12, opt));
    }
    {
        double worst = 0;
        for (int t = 0; t < 20; t++) {
            const TruncatedFockState in = random_pure_fock_state(g, opt.fock_cutoff);
            const TruncatedFockState outs = dephase_truncated(in, Side::A);
            worst = std::max(worst, -pt_spectrum(outs.rho()).min());
            const auto parts = separable_decomposition_dephased(in);
            worst = std::max(worst,
                             frobenius_distance(reconstruct_separable(parts, opt.fock_cutoff), outs.rho().matrix()));
        }
        out.push_back(detail::make_suite("gaussian-cv: dephased output separable", std::max(worst, 0.0), 1e-10, opt));
    }
    return out;
}

inline VerifyOptions verify_options(const ExperimentConfig &cfg) {
    VerifyOptions opt;
    opt.seed = cfg.get_seed();
    opt.mc_samples = cfg.mc_samples();
    if (cfg.has("tol")) {
        opt.tol = cfg.get_double("tol");
        if (!(*opt.tol > 0)) {
            throw ConfigError("tol must be positive");
        }
    }
    const auto cutoff = cfg.get_int("fock_cutoff", 8);
    if (cutoff < 2 || cutoff > 16) {
        throw ConfigError("fock_cutoff must be in [2, 16]");
    }
    opt.fock_cutoff = static_cast<std::size_t>(cutoff);
    return opt;
}

/// Result of one CLI invocation: the document to emit and the exit status.
struct RunOutcome {
    json document;
    std::vector<ResultRow> rows;
    int exit_code = 0;
};

/// Dispatches a scenario. ConfigError and std::invalid_argument propagate to
/// the caller (exit code 2).
inline RunOutcome run_experiment(const ExperimentConfig &cfg, std::ostream &diag) {
    RunOutcome out;
    out.document = json{{"scenario", scenario_name(cfg.scenario)}, {"config", cfg.params}};
    switch (cfg.scenario) {
        case Scenario::pauli:
            out.rows = run_pauli_scenario(cfg, diag);
            break;
        case Scenario::qudit_twirl:
            out.rows = run_qudit_scenario(cfg, diag);
            break;
        case Scenario::bosonic:
            out.rows = run_bosonic_scenario(cfg, diag);
            break;
        case Scenario::eb_test:
            out.rows = {run_eb_test(cfg, diag)};
            break;
        case Scenario::verify: {
            const auto suites = run_verify_suites(verify_options(cfg));
            json js = json::array();
            bool all = true;
            for (const auto &s : suites) {
                js.push_back(to_json(s));
                all = all && s.passed;
                if (!s.passed) {
                    diag << "FAIL " << s.name << ": residual " << format_number(s.max_residual) << " > "
                         << format_number(s.tolerance) << "\n";
                }
            }
            out.document["suites"] = js;
            out.document["passed"] = all;
            out.exit_code = all ? 0 : 1;
            return out;
        }
    }
    json rows = json::array();
    for (const auto &r : out.rows) {
        rows.push_back(to_json(r));
    }
    out.document["rows"] = rows;
    const double default_tol = cfg.scenario == Scenario::qudit_twirl ? 1e-11 : 1e-12;
    const double tol = cfg.has("tol") ? cfg.get_double("tol") : default_tol;
    for (const auto &r : out.rows) {
        bool ok = true;
        switch (cfg.scenario) {
            case Scenario::pauli:
            case Scenario::bosonic:
                ok = r.invariance_residual <= tol && r.eb_verdict != "NPT" &&
                     r.eb_verdict != "entangled point found";
                break;
            case Scenario::qudit_twirl:
                ok = r.invariance_residual <= tol &&
                     r.details.at("mc_residual").get<double>() <= r.details.at("mc_tolerance").get<double>();
                break;
            default:
                break;
        }
        if (!ok) {
            diag << "FAIL " << r.scenario << " " << r.parameters.dump() << "\n";
            out.exit_code = 1;
        }
    }
    out.document["passed"] = out.exit_code == 0;
    return out;
}

}  // namespace twirlbreak
