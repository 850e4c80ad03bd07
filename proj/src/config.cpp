#include "cobro/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "cobro/errors.hpp"

namespace cobro {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw config_error(where + ": expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw config_error(where + ": unknown key '" + item.key() + "'");
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw config_error(where + ": expected a number");
    return v.get<double>();
}

std::vector<double> as_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw config_error(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

void merge_market(const json& j, MarketParams& m) {
    require_keys(j, "market", {"r", "s0_1", "s0_2", "sigma1", "sigma2"});
    if (j.contains("r")) m.r = as_number(j["r"], "market.r");
    if (j.contains("s0_1")) m.s0_1 = as_number(j["s0_1"], "market.s0_1");
    if (j.contains("s0_2")) m.s0_2 = as_number(j["s0_2"], "market.s0_2");
    if (j.contains("sigma1")) m.sigma1 = as_number(j["sigma1"], "market.sigma1");
    if (j.contains("sigma2")) m.sigma2 = as_number(j["sigma2"], "market.sigma2");
}

void merge_regime(const json& j, const std::string& where, RegimeConfig& cfg) {
    require_keys(j, where, {"generator", "q0", "alpha"});
    if (j.contains("generator")) {
        const json& g = j["generator"];
        if (!g.is_array() || g.empty())
            throw config_error(where + ".generator: expected an array of rows");
        const int n = static_cast<int>(g.size());
        Generator gen;
        gen.n = n;
        gen.a.resize(static_cast<size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            const std::vector<double> row =
                as_vector(g[i], where + ".generator[" + std::to_string(i) + "]");
            if (static_cast<int>(row.size()) != n)
                throw config_error(where + ".generator: rows must be length " +
                                   std::to_string(n));
            for (int k = 0; k < n; ++k) gen(i, k) = row[k];
        }
        cfg.gen = std::move(gen);
    }
    if (j.contains("q0")) cfg.q0 = as_vector(j["q0"], where + ".q0");
    if (j.contains("alpha")) cfg.alpha = as_vector(j["alpha"], where + ".alpha");
}

void merge_grid(const json& j, const std::string& where, FourierGrid& g) {
    require_keys(j, where, {"n1", "n", "eta1", "eta", "lam1_im", "lam_im"});
    const auto as_count = [&](const json& v, const std::string& k) {
        const double d = as_number(v, where + "." + k);
        const int n = static_cast<int>(d);
        if (d != n || n < 1) throw config_error(where + "." + k + ": expected a count >= 1");
        return n;
    };
    if (j.contains("n1")) g.n1 = as_count(j["n1"], "n1");
    if (j.contains("n")) g.n = as_count(j["n"], "n");
    if (j.contains("eta1")) g.eta1 = as_number(j["eta1"], where + ".eta1");
    if (j.contains("eta")) g.eta = as_number(j["eta"], where + ".eta");
    if (j.contains("lam1_im")) g.lam1_im = as_number(j["lam1_im"], where + ".lam1_im");
    if (j.contains("lam_im")) g.lam_im = as_number(j["lam_im"], where + ".lam_im");
}

void merge_table4(const json& j, Table4Config& t) {
    require_keys(j, "table4",
                 {"style", "strike", "maturity", "q0", "alpha_sets", "history_horizon",
                  "history_dt"});
    if (j.contains("style")) {
        if (!j["style"].is_string()) throw config_error("table4.style: expected a string");
        t.style = parse_style(j["style"].get<std::string>());
    }
    if (j.contains("strike")) t.strike = as_number(j["strike"], "table4.strike");
    if (j.contains("maturity")) t.maturity = as_number(j["maturity"], "table4.maturity");
    if (j.contains("q0")) t.q0 = as_vector(j["q0"], "table4.q0");
    if (j.contains("alpha_sets")) {
        const json& s = j["alpha_sets"];
        if (!s.is_array() || s.empty())
            throw config_error("table4.alpha_sets: expected a non-empty array");
        t.alpha_sets.clear();
        for (size_t i = 0; i < s.size(); ++i)
            t.alpha_sets.push_back(
                as_vector(s[i], "table4.alpha_sets[" + std::to_string(i) + "]"));
    }
    if (j.contains("history_horizon"))
        t.history_horizon = as_number(j["history_horizon"], "table4.history_horizon");
    if (j.contains("history_dt"))
        t.history_dt = as_number(j["history_dt"], "table4.history_dt");
}

uint64_t as_u64(const json& v, const std::string& where) {
    if (!v.is_number_unsigned())
        throw config_error(where + ": expected a non-negative integer");
    return v.get<uint64_t>();
}

} // namespace

void Table4Config::validate() const {
    if (!(strike >= 0.0) || !(maturity > 0.0))
        throw config_error("table4: strike must be >= 0 and maturity > 0");
    if (!(history_horizon > 0.0) || !(history_dt > 0.0) || history_dt > history_horizon)
        throw config_error("table4: need 0 < history_dt <= history_horizon");
    if (alpha_sets.empty()) throw config_error("table4: alpha_sets must be non-empty");
}

void ExperimentConfig::validate() const {
    market.validate();
    regime.validate();
    regime_alt.validate();
    fourier.validate();
    calibration_fourier.validate();
    table4.validate();
    if (paths < 2) throw config_error("paths must be >= 2");
    if (!(sim_horizon > 0.0) || !(sim_dt > 0.0) || sim_dt > sim_horizon)
        throw config_error("need 0 < sim_dt <= sim_horizon");
    if (output_dir.empty()) throw config_error("output_dir must be non-empty");
    for (const auto& alpha : table4.alpha_sets) {
        RegimeConfig row{regime.gen, table4.q0, alpha};
        row.validate(); // every table row must form a valid regime model
    }
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.market = MarketParams{0.05, 100.0, 120.0, 0.2, 0.3};

    Generator gen;
    gen.n = 3;
    gen.a = {-1.0, 0.8, 0.2, 0.4, -1.0, 0.6, 0.3, 0.7, -1.0};
    c.regime = RegimeConfig{gen, {1.0, 0.0, 0.0}, {0.3, 0.6, 0.9}};
    c.regime_alt = RegimeConfig{gen, {0.2, 0.0, 0.8}, {0.3, 0.6, 0.95}};

    c.fourier = FourierGrid{1000, 1000, 0.1, 0.1, 1.0, 1.0};
    c.calibration_fourier = FourierGrid{400, 400, 0.1, 0.1, 1.0, 1.0};
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error("config parse error: " + std::string(e.what()));
    }

    ExperimentConfig cfg = default_config();
    require_keys(root, "config",
                 {"market", "regime", "regime_alt", "fourier", "calibration_fourier",
                  "seed", "paths", "output_dir", "sim_horizon", "sim_dt", "table4"});
    if (root.contains("market")) merge_market(root["market"], cfg.market);
    if (root.contains("regime")) merge_regime(root["regime"], "regime", cfg.regime);
    if (root.contains("regime_alt"))
        merge_regime(root["regime_alt"], "regime_alt", cfg.regime_alt);
    if (root.contains("fourier")) merge_grid(root["fourier"], "fourier", cfg.fourier);
    if (root.contains("calibration_fourier"))
        merge_grid(root["calibration_fourier"], "calibration_fourier",
                   cfg.calibration_fourier);
    if (root.contains("seed")) cfg.seed = as_u64(root["seed"], "seed");
    if (root.contains("paths")) cfg.paths = as_u64(root["paths"], "paths");
    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string())
            throw config_error("output_dir: expected a string");
        cfg.output_dir = root["output_dir"].get<std::string>();
    }
    if (root.contains("sim_horizon"))
        cfg.sim_horizon = as_number(root["sim_horizon"], "sim_horizon");
    if (root.contains("sim_dt")) cfg.sim_dt = as_number(root["sim_dt"], "sim_dt");
    if (root.contains("table4")) merge_table4(root["table4"], cfg.table4);

    cfg.validate();
    return cfg;
}

} // namespace cobro
