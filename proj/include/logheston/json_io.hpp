#pragma once

// JSON (de)serialization for the public result and config types.
// Residual vectors are deliberately excluded from fit serializations --
// they travel as CSV artifacts, not inside result documents.

#include <string>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "estimation.hpp"
#include "simulate.hpp"
#include "stats.hpp"
#include "tails.hpp"
#include "vargamma.hpp"

namespace logheston {

using nlohmann::json;

inline void to_json(json& j, const YearMonth& ym) { j = ym.str(); }

inline void from_json(const json& j, YearMonth& ym) {
    const std::string s = j.get<std::string>();
    if (s.size() != 7 || s[4] != '-')
        throw std::invalid_argument("YearMonth: expected YYYY-MM, got " + s);
    ym.year = std::stoi(s.substr(0, 4));
    ym.month = std::stoi(s.substr(5, 2));
}

inline void to_json(json& j, const VgParams& p) {
    j = json{{"a", p.a}, {"b", p.b}, {"c", p.c}, {"nu", p.nu}};
}

inline void from_json(const json& j, VgParams& p) {
    j.at("a").get_to(p.a);
    j.at("b").get_to(p.b);
    j.at("c").get_to(p.c);
    j.at("nu").get_to(p.nu);
}

inline void to_json(json& j, const VgFit& f) {
    j = json{{"params", f.params},
             {"start", f.start},
             {"loglik", f.loglik},
             {"iterations", f.iterations},
             {"converged", f.converged}};
}

inline void to_json(json& j, const DiagnosticsSummary& d) {
    j = json{{"skewness", d.skewness},
             {"excess_kurtosis", d.excess_kurtosis},
             {"acf", d.acf},
             {"abs_acf", d.abs_acf},
             {"acf_norm", d.acf_norm},
             {"abs_acf_norm", d.abs_acf_norm},
             {"jb_stat", d.jb_stat},
             {"jb_pvalue", d.jb_pvalue}};
}

inline void to_json(json& j, const Ar1Fit& f) {
    j = json{{"alpha", f.alpha},
             {"beta", f.beta},
             {"r_squared", f.r_squared},
             {"delta_corr", f.delta_corr},
             {"slope_pvalue", f.slope_pvalue},
             {"n", f.n},
             {"scale", f.scale == Ar1Scale::log_scale ? "log" : "level"}};
}

inline void to_json(json& j, const ReturnsRegressionFit& f) {
    j = json{{"theta", f.theta},
             {"mu", f.mu},
             {"sigma", f.sigma},
             {"theta_pvalue", f.theta_pvalue},
             {"mu_pvalue", f.mu_pvalue},
             {"n", f.n}};
}

inline void to_json(json& j, const NormalizedMoments& m) {
    j = json{{"mean", m.mean}, {"stdev", m.stdev}};
}

inline void to_json(json& j, const AdfResult& r) {
    j = json{{"statistic", r.statistic},
             {"lags", r.lags},
             {"n", r.n},
             {"critical_values",
              json{{"one_percent", r.critical_values[0]},
                   {"five_percent", r.critical_values[1]},
                   {"ten_percent", r.critical_values[2]}}},
             {"reject_at", r.reject_at}};
}

inline void to_json(json& j, const HillEstimates& h) {
    j = json{{"gamma_left", h.gamma_left},
             {"gamma_right", h.gamma_right},
             {"r", h.r}};
}

inline std::string to_string(WKind k) {
    switch (k) {
        case WKind::normal: return "normal";
        case WKind::vargamma: return "vargamma";
        case WKind::empirical: return "empirical";
    }
    return "normal";
}

inline std::string to_string(Coupling c) {
    return c == Coupling::gaussian_copula ? "gaussian_copula" : "independent";
}

inline void to_json(json& j, const WSpec& w) {
    j = json{{"kind", to_string(w.kind)}};
    switch (w.kind) {
        case WKind::normal: j["normal_sd"] = w.normal_sd; break;
        case WKind::vargamma: j["vg"] = w.vg; break;
        case WKind::empirical: j["pool"] = w.pool; break;
    }
}

inline void from_json(const json& j, WSpec& w) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "normal") {
        w.kind = WKind::normal;
        w.normal_sd = j.at("normal_sd").get<double>();
    } else if (kind == "vargamma") {
        w.kind = WKind::vargamma;
        w.vg = j.at("vg").get<VgParams>();
    } else if (kind == "empirical") {
        w.kind = WKind::empirical;
        w.pool = j.at("pool").get<std::vector<double>>();
    } else {
        throw std::invalid_argument("WSpec: unknown kind '" + kind + "'");
    }
}

inline void to_json(json& j, const SvModelParams& m) {
    j = json{{"alpha", m.alpha},       {"beta", m.beta},
             {"theta", m.theta},       {"mu", m.mu},
             {"sigma", m.sigma},       {"w_dist", m.w_dist},
             {"coupling", to_string(m.coupling)},
             {"copula_rho", m.copula_rho},
             {"v0", m.v0}};
}

inline void from_json(const json& j, SvModelParams& m) {
    j.at("alpha").get_to(m.alpha);
    j.at("beta").get_to(m.beta);
    j.at("theta").get_to(m.theta);
    j.at("mu").get_to(m.mu);
    j.at("sigma").get_to(m.sigma);
    j.at("w_dist").get_to(m.w_dist);
    const std::string c = j.value("coupling", "independent");
    if (c == "independent") m.coupling = Coupling::independent;
    else if (c == "gaussian_copula") m.coupling = Coupling::gaussian_copula;
    else throw std::invalid_argument("SvModelParams: unknown coupling '" + c + "'");
    m.copula_rho = j.value("copula_rho", 0.0);
    j.at("v0").get_to(m.v0);
}

inline void to_json(json& j, const StationaryMomentReport& r) {
    j = json{{"u", r.u},
             {"estimate", r.estimate},
             {"mc_stderr", r.mc_stderr},
             {"theory", r.theory},
             {"max_rel_drift", r.max_rel_drift},
             {"drift_ok", r.drift_ok},
             {"n", r.n},
             {"burnin", r.burnin},
             {"reps", r.reps},
             {"seed", r.seed}};
}

inline void to_json(json& j, const PathMomentsReport& r) {
    j = json{{"mean_lnv", r.mean_lnv},
             {"var_lnv", r.var_lnv},
             {"mean_stderr", r.mean_stderr},
             {"var_stderr", r.var_stderr},
             {"mean_theory", r.mean_theory},
             {"var_theory", r.var_theory},
             {"n", r.n},
             {"burnin", r.burnin},
             {"batches", r.batches},
             {"seed", r.seed},
             {"stream", r.stream}};
}

inline void to_json(json& j, const LlnCltSizeRow& r) {
    j = json{{"T", r.T},
             {"mean_of_means", r.mean_of_means},
             {"sd_of_means", r.sd_of_means},
             {"jb_pvalue", r.jb_pvalue},
             {"ks_pvalue", r.ks_pvalue}};
}

inline void to_json(json& j, const LlnCltReport& r) {
    j = json{{"rows", r.rows},
             {"sd_ratios", r.sd_ratios},
             {"expected_ratios", r.expected_ratios},
             {"sigma_q", r.sigma_q},
             {"reps", r.reps},
             {"burnin", r.burnin},
             {"seed", r.seed},
             {"lln_pass", r.lln_pass},
             {"clt_pass", r.clt_pass}};
}

inline void to_json(json& j, const TailIndexReport& r) {
    j = json{{"hill_index", r.hill_index},
             {"t_max", r.t_max},
             {"rel_gap", r.rel_gap},
             {"pareto_detected", r.pareto_detected},
             {"n", r.n},
             {"r", r.r},
             {"burnin", r.burnin},
             {"seed", r.seed}};
}

}  // namespace logheston
