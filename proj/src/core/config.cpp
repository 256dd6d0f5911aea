#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace spotsim::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ConfigError("config." + key + ": " + why);
}

double get_number(const json& obj, const std::string& section, const std::string& key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) bad_key(section + "." + key, "missing required key");
        return fallback;
    }
    if (!obj[key].is_number()) bad_key(section + "." + key, "expected a number");
    return obj[key].get<double>();
}

bool get_bool(const json& obj, const std::string& section, const std::string& key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) bad_key(section + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& section, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) bad_key(section + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

market::ForwardCurve parse_forward(const json& model) {
    if (!model.contains("forward")) {
        return market::ForwardCurve::flat(get_number(model, "model", "s0", 22.0));
    }
    const json& fwd = model["forward"];
    if (fwd.is_number()) return market::ForwardCurve::flat(fwd.get<double>());
    if (!fwd.is_object()) bad_key("model.forward", "expected a number or an object");
    if (fwd.contains("flat")) return market::ForwardCurve::flat(fwd["flat"].get<double>());
    if (fwd.contains("times") && fwd.contains("values")) {
        return market::ForwardCurve::tabulated(fwd["times"].get<std::vector<double>>(),
                                               fwd["values"].get<std::vector<double>>());
    }
    bad_key("model.forward", "expected 'flat' or 'times'+'values'");
}

market::MarketModel parse_model(const json& root) {
    if (!root.contains("model") || !root["model"].is_object()) {
        throw ConfigError("config.model: missing model section");
    }
    const json& m = root["model"];
    market::MarketModel model;
    model.diffusion.k_d = get_number(m, "model", "k_d", 67.0);
    model.diffusion.sigma = get_number(m, "model", "sigma_d", 0.25);
    model.diffusion.x0 = get_number(m, "model", "x0", 0.0);
    model.y1_0 = get_number(m, "model", "y1_0", 0.0);
    model.y2_0 = get_number(m, "model", "y2_0", 0.0);
    model.rate = get_number(m, "model", "rate", 0.0);
    model.forward = parse_forward(m);

    const int jump_case = static_cast<int>(get_number(m, "model", "case", 0.0, true));
    if (jump_case == 1) {
        market::Case1Jumps c1;
        c1.k = get_number(m, "model", "k", c1.k, true);
        c1.lambda = get_number(m, "model", "lambda", c1.lambda, true);
        c1.p = get_number(m, "model", "p", c1.p, true);
        c1.beta1 = get_number(m, "model", "beta1", c1.beta1, true);
        c1.beta2 = get_number(m, "model", "beta2", c1.beta2, true);
        model.jumps = c1;
    } else if (jump_case == 2) {
        market::Case2Jumps c2;
        c2.k1 = get_number(m, "model", "k1", c2.k1, true);
        c2.k2 = get_number(m, "model", "k2", c2.k2, true);
        c2.lambda1 = get_number(m, "model", "lambda1", c2.lambda1, true);
        c2.lambda2 = get_number(m, "model", "lambda2", c2.lambda2, true);
        c2.beta1 = get_number(m, "model", "beta1", c2.beta1, true);
        c2.beta2 = get_number(m, "model", "beta2", c2.beta2, true);
        model.jumps = c2;
    } else if (jump_case == 3) {
        market::Case3Jumps c3;
        c3.k = get_number(m, "model", "k", c3.k, true);
        c3.beta = get_number(m, "model", "beta", c3.beta, true);
        if (m.contains("intensity") && m["intensity"].is_object()) {
            const json& in = m["intensity"];
            if (in.contains("constant")) {
                c3.constant_intensity = in["constant"].get<double>();
            } else if (in.contains("theta")) {
                market::SeasonalIntensitySpec s;
                s.theta = get_number(in, "model.intensity", "theta", s.theta, true);
                s.omega = get_number(in, "model.intensity", "omega", s.omega, true);
                s.tau = get_number(in, "model.intensity", "tau", s.tau, true);
                c3.seasonal = s;
            } else {
                bad_key("model.intensity", "expected 'constant' or 'theta'+'omega'+'tau'");
            }
        } else {
            c3.constant_intensity = get_number(m, "model", "lambda", c3.constant_intensity);
        }
        model.jumps = c3;
    } else {
        bad_key("model.case", "must be 1, 2 or 3");
    }

    const std::string route1 = get_string(m, "model", "case1_route", "two-leg");
    if (route1 == "two-leg") {
        model.case1_route = market::Case1Route::TwoLeg;
    } else if (route1 == "single-kou") {
        model.case1_route = market::Case1Route::SingleKou;
    } else {
        bad_key("model.case1_route", "expected 'two-leg' or 'single-kou'");
    }
    const std::string route3 = get_string(m, "model", "case3_route", "combined");
    if (route3 == "combined") {
        model.case3_route = market::Case3Route::Combined;
    } else if (route3 == "two-leg") {
        model.case3_route = market::Case3Route::TwoLeg;
    } else {
        bad_key("model.case3_route", "expected 'combined' or 'two-leg'");
    }
    return model;
}

void parse_contract(const json& root, RunConfig& cfg) {
    if (!root.contains("contract")) return;
    const json& c = root["contract"];
    if (!c.is_object()) throw ConfigError("config.contract: expected an object");
    const std::string type = get_string(c, "contract", "type", "");
    if (type == "asian") {
        cfg.contract = ContractType::Asian;
        cfg.asian.strike = get_number(c, "contract", "strike", 22.0);
        cfg.asian.maturity = get_number(c, "contract", "maturity", 1.0);
    } else if (type == "storage") {
        cfg.contract = ContractType::Storage;
        pricing::StorageSpec& s = cfg.storage;
        s.c_min = get_number(c, "contract", "c_min", s.c_min);
        s.c_max = get_number(c, "contract", "c_max", s.c_max);
        s.c_start = get_number(c, "contract", "c_start", s.c_start);
        s.c_end_target = get_number(c, "contract", "c_end_target", s.c_end_target);
        s.a_in = get_number(c, "contract", "a_in", s.a_in);
        s.a_w = get_number(c, "contract", "a_w", s.a_w);
        s.k_in = get_number(c, "contract", "k_in", s.k_in);
        s.k_out = get_number(c, "contract", "k_out", s.k_out);
        s.k_n = get_number(c, "contract", "k_n", s.k_n);
        s.horizon_years = get_number(c, "contract", "horizon_years", s.horizon_years);
        const std::string rule = get_string(c, "contract", "terminal_rule", "hard");
        if (rule == "hard") {
            s.terminal.hard = true;
        } else if (rule == "penalty") {
            s.terminal.hard = false;
            s.terminal.penalty_per_mwh = get_number(c, "contract", "penalty_per_mwh", 0.0);
        } else {
            bad_key("contract.terminal_rule", "expected 'hard' or 'penalty'");
        }
    } else if (type == "swing") {
        cfg.contract = ContractType::Swing;
        pricing::SwingSpec& s = cfg.swing;
        s.strike = get_number(c, "contract", "strike", s.strike);
        s.a_w = get_number(c, "contract", "a_w", s.a_w);
        s.rights = get_number(c, "contract", "rights", s.rights);
        s.horizon_years = get_number(c, "contract", "horizon_years", s.horizon_years);
    } else if (type.empty()) {
        cfg.contract = ContractType::None;
    } else {
        bad_key("contract.type", "expected 'asian', 'storage' or 'swing'");
    }
}

}  // namespace

std::string_view to_string(ContractType type) {
    switch (type) {
        case ContractType::None: return "none";
        case ContractType::Asian: return "asian";
        case ContractType::Storage: return "storage";
        case ContractType::Swing: return "swing";
    }
    return "none";
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    cfg.model = parse_model(root);
    parse_contract(root, cfg);

    if (root.contains("simulation")) {
        const json& s = root["simulation"];
        cfg.n_paths = static_cast<std::size_t>(get_number(s, "simulation", "n_paths", 10000));
        cfg.seed = static_cast<std::uint64_t>(get_number(s, "simulation", "seed", 42));
        cfg.steps_per_year =
            static_cast<int>(get_number(s, "simulation", "steps_per_year", 365));
        cfg.horizon_years = get_number(s, "simulation", "horizon_years", 1.0);
        cfg.workers = static_cast<int>(get_number(s, "simulation", "workers", 0));
        cfg.retain_factors = get_bool(s, "simulation", "retain_factors", false);
        cfg.model.allow_biased = get_bool(s, "simulation", "allow_biased", false);
        cfg.model.sort_jump_times = get_bool(s, "simulation", "sort_jump_times", false);
        cfg.model.sampler =
            ou::sampler_kind_from_string(get_string(s, "simulation", "sampler", "polya"));
    }
    if (root.contains("lsmc")) {
        const json& l = root["lsmc"];
        cfg.lsmc.volume_step = get_number(l, "lsmc", "volume_step", cfg.lsmc.volume_step);
        cfg.lsmc.basis_degree =
            static_cast<int>(get_number(l, "lsmc", "basis_degree", cfg.lsmc.basis_degree));
    }
    if (root.contains("bench")) {
        const json& b = root["bench"];
        if (b.contains("ladder")) cfg.bench.ladder = b["ladder"].get<std::vector<std::size_t>>();
        cfg.bench.reps = static_cast<int>(get_number(b, "bench", "reps", cfg.bench.reps));
        cfg.bench.warmup = static_cast<int>(get_number(b, "bench", "warmup", cfg.bench.warmup));
        cfg.bench.include_lsmc = get_bool(b, "bench", "include_lsmc", cfg.bench.include_lsmc);
        cfg.bench.lsmc_n_paths = static_cast<std::size_t>(
            get_number(b, "bench", "lsmc_n_paths", static_cast<double>(cfg.bench.lsmc_n_paths)));
        cfg.bench.force = get_bool(b, "bench", "force", cfg.bench.force);
        for (std::size_t i = 1; i < cfg.bench.ladder.size(); ++i) {
            if (cfg.bench.ladder[i] <= cfg.bench.ladder[i - 1]) {
                bad_key("bench.ladder", "must be strictly increasing");
            }
        }
    }
    if (root.contains("output")) {
        cfg.out_dir = get_string(root["output"], "output", "dir", cfg.out_dir);
    }
    cfg.model.validate();
    if (cfg.n_paths < 1) throw ConfigError("config.simulation.n_paths: must be >= 1");
    if (cfg.steps_per_year < 1) throw ConfigError("config.simulation.steps_per_year: must be >= 1");
    if (!(cfg.horizon_years > 0.0)) throw ConfigError("config.simulation.horizon_years: must be > 0");
    return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string RunConfig::to_json_text() const {
    json m;
    m["case"] = model.jump_case();
    m["k_d"] = model.diffusion.k_d;
    m["sigma_d"] = model.diffusion.sigma;
    m["x0"] = model.diffusion.x0;
    m["y1_0"] = model.y1_0;
    m["y2_0"] = model.y2_0;
    m["rate"] = model.rate;
    if (model.forward.is_flat()) {
        m["forward"] = {{"flat", model.forward.flat_level()}};
    } else {
        m["forward"] = {{"times", model.forward.times()}, {"values", model.forward.values()}};
    }
    if (const auto* c1 = std::get_if<market::Case1Jumps>(&model.jumps)) {
        m["k"] = c1->k;
        m["lambda"] = c1->lambda;
        m["p"] = c1->p;
        m["beta1"] = c1->beta1;
        m["beta2"] = c1->beta2;
    } else if (const auto* c2 = std::get_if<market::Case2Jumps>(&model.jumps)) {
        m["k1"] = c2->k1;
        m["k2"] = c2->k2;
        m["lambda1"] = c2->lambda1;
        m["lambda2"] = c2->lambda2;
        m["beta1"] = c2->beta1;
        m["beta2"] = c2->beta2;
    } else if (const auto* c3 = std::get_if<market::Case3Jumps>(&model.jumps)) {
        m["k"] = c3->k;
        m["beta"] = c3->beta;
        if (c3->seasonal) {
            m["intensity"] = {{"theta", c3->seasonal->theta},
                              {"omega", c3->seasonal->omega},
                              {"tau", c3->seasonal->tau}};
        } else {
            m["intensity"] = {{"constant", c3->constant_intensity}};
        }
    }
    m["case1_route"] =
        model.case1_route == market::Case1Route::TwoLeg ? "two-leg" : "single-kou";
    m["case3_route"] =
        model.case3_route == market::Case3Route::Combined ? "combined" : "two-leg";

    json root;
    root["model"] = m;
    if (contract != ContractType::None) {
        json c;
        c["type"] = std::string(to_string(contract));
        if (contract == ContractType::Asian) {
            c["strike"] = asian.strike;
            c["maturity"] = asian.maturity;
        } else if (contract == ContractType::Storage) {
            c["c_min"] = storage.c_min;
            c["c_max"] = storage.c_max;
            c["c_start"] = storage.c_start;
            c["c_end_target"] = storage.c_end_target;
            c["a_in"] = storage.a_in;
            c["a_w"] = storage.a_w;
            c["k_in"] = storage.k_in;
            c["k_out"] = storage.k_out;
            c["k_n"] = storage.k_n;
            c["horizon_years"] = storage.horizon_years;
            c["terminal_rule"] = storage.terminal.hard ? "hard" : "penalty";
            if (!storage.terminal.hard) c["penalty_per_mwh"] = storage.terminal.penalty_per_mwh;
        } else if (contract == ContractType::Swing) {
            c["strike"] = swing.strike;
            c["a_w"] = swing.a_w;
            c["rights"] = swing.rights;
            c["horizon_years"] = swing.horizon_years;
        }
        root["contract"] = c;
    }
    root["simulation"] = {{"n_paths", n_paths},
                          {"seed", seed},
                          {"steps_per_year", steps_per_year},
                          {"horizon_years", horizon_years},
                          {"workers", workers},
                          {"retain_factors", retain_factors},
                          {"allow_biased", model.allow_biased},
                          {"sort_jump_times", model.sort_jump_times},
                          {"sampler", std::string(ou::to_string(model.sampler))}};
    root["lsmc"] = {{"volume_step", lsmc.volume_step}, {"basis_degree", lsmc.basis_degree}};
    root["bench"] = {{"ladder", bench.ladder},
                     {"reps", bench.reps},
                     {"warmup", bench.warmup},
                     {"include_lsmc", bench.include_lsmc},
                     {"lsmc_n_paths", bench.lsmc_n_paths},
                     {"force", bench.force}};
    root["output"] = {{"dir", out_dir}};
    return root.dump(2) + "\n";
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
    try {
        if (key == "seed") {
            seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key == "n_paths") {
            n_paths = static_cast<std::size_t>(std::stoull(value));
            if (n_paths < 1) throw ConfigError("override n_paths: must be >= 1");
        } else if (key == "sampler") {
            model.sampler = ou::sampler_kind_from_string(value);
        } else if (key == "workers") {
            workers = std::stoi(value);
        } else if (key == "allow_biased") {
            model.allow_biased = value == "true" || value == "1";
        } else if (key == "out_dir") {
            out_dir = value;
        } else if (key == "bench_force") {
            bench.force = value == "true" || value == "1";
        } else if (key == "contract") {
            if (value == "asian") {
                contract = ContractType::Asian;
            } else if (value == "storage") {
                contract = ContractType::Storage;
            } else if (value == "swing") {
                contract = ContractType::Swing;
            } else {
                throw ConfigError("override contract: unknown type '" + value + "'");
            }
        } else {
            throw ConfigError("override: unknown key '" + key + "'");
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("override " + key + ": cannot parse value '" + value + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("override " + key + ": value out of range '" + value + "'");
    }
    model.validate();
}

}  // namespace spotsim::app
