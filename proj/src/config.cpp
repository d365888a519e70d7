#include "loadshare/config.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "loadshare/errors.hpp"

namespace loadshare {

namespace {

using nlohmann::json;

// Tracks which keys of an object have been consumed so finish() can reject
// everything unexpected, with its path.
class ObjectReader {
public:
    ObjectReader(const json& node, std::string path)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object())
            throw ConfigError(label() + ": expected an object");
    }

    const json& required(const char* key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        if (it == node_.end())
            throw ConfigError(join(key) + ": missing required field");
        return *it;
    }

    const json* optional(const char* key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& item : node_.items())
            if (!seen_.count(item.key()))
                throw ConfigError(join(item.key()) + ": unknown key");
    }

    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    std::string label() const { return path_.empty() ? "config" : path_; }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

long long as_integer(const json& j, const std::string& path, long long lo,
                     long long hi) {
    if (!j.is_number_integer())
        throw ConfigError(path + ": expected an integer");
    const long long v = j.get<long long>();
    if (v < lo || v > hi)
        throw ConfigError(path + ": must lie in [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
    return v;
}

std::uint64_t as_seed(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<long long>() >= 0)
        return static_cast<std::uint64_t>(j.get<long long>());
    throw ConfigError(path + ": expected a nonnegative integer");
}

Prices parse_prices(const json& node) {
    ObjectReader reader(node, "prices");
    const double r_r = as_number(reader.required("r_r"), "prices.r_r");
    const double r_w = as_number(reader.required("r_w"), "prices.r_w");
    const double b_minus =
        as_number(reader.required("b_minus"), "prices.b_minus");
    const double b_plus = as_number(reader.required("b_plus"), "prices.b_plus");
    reader.finish();
    try {
        return Prices(r_r, r_w, b_minus, b_plus);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("prices: ") + e.what());
    }
}

AlphaPolicy parse_alpha_policy(const json& node) {
    ObjectReader reader(node, "alpha_policy");
    const json* fixed = reader.optional("fixed");
    const json* uniform = reader.optional("uniform_random");
    reader.finish();
    if ((fixed != nullptr) == (uniform != nullptr))
        throw ConfigError(
            "alpha_policy: expected exactly one of 'fixed' or "
            "'uniform_random'");
    if (fixed) {
        ObjectReader f(*fixed, "alpha_policy.fixed");
        const double value =
            as_number(f.required("value"), "alpha_policy.fixed.value");
        f.finish();
        return AlphaPolicy::fixed(value);
    }
    ObjectReader u(*uniform, "alpha_policy.uniform_random");
    const double low =
        as_number(u.required("low"), "alpha_policy.uniform_random.low");
    const double high =
        as_number(u.required("high"), "alpha_policy.uniform_random.high");
    u.finish();
    return AlphaPolicy::uniform_random(low, high);
}

ScenarioConfig parse_document(const json& doc) {
    ObjectReader root(doc, "");
    ScenarioConfig cfg;

    cfg.prices = parse_prices(root.required("prices"));
    cfg.customers = static_cast<int>(as_integer(
        root.required("customers"), "customers", 1, Coalition::kMaxPlayers - 1));
    cfg.beta_s = as_number(root.required("beta_s"), "beta_s");
    cfg.beta_u = as_number(root.required("beta_u"), "beta_u");
    cfg.alpha_policy = parse_alpha_policy(root.required("alpha_policy"));
    cfg.timestep_minutes = static_cast<int>(as_integer(
        root.required("timestep_minutes"), "timestep_minutes", 1, 1440));
    cfg.horizon = static_cast<int>(
        as_integer(root.required("horizon"), "horizon", 1, 10'000'000));
    cfg.master_seed = as_seed(root.required("master_seed"), "master_seed");

    const json& engine = root.required("expectation_engine");
    if (engine.is_string()) {
        if (engine.get<std::string>() != "analytical")
            throw ConfigError("expectation_engine: unknown engine '" +
                              engine.get<std::string>() + "'");
        cfg.expectation_engine = EngineConfig::Kind::analytical;
    } else {
        ObjectReader reader(engine, "expectation_engine");
        const json& mc = reader.required("monte_carlo");
        reader.finish();
        ObjectReader m(mc, "expectation_engine.monte_carlo");
        cfg.mc_samples =
            as_integer(m.required("n_samples"),
                       "expectation_engine.monte_carlo.n_samples", 2,
                       1'000'000'000);
        m.finish();
        cfg.expectation_engine = EngineConfig::Kind::monte_carlo;
    }

    const json& methods = root.required("allocation_methods");
    if (!methods.is_array())
        throw ConfigError("allocation_methods: expected an array");
    cfg.allocation_methods.clear();
    for (std::size_t i = 0; i < methods.size(); ++i) {
        const std::string path =
            "allocation_methods[" + std::to_string(i) + "]";
        if (!methods[i].is_string())
            throw ConfigError(path + ": expected a string");
        const std::string name = methods[i].get<std::string>();
        if (name == "shapley")
            cfg.allocation_methods.push_back(AllocationMethod::shapley);
        else if (name == "nucleolus")
            cfg.allocation_methods.push_back(AllocationMethod::nucleolus);
        else
            throw ConfigError(path + ": unknown method '" + name + "'");
    }

    if (const json* gv = root.optional("grid_validation")) {
        ObjectReader g(*gv, "grid_validation");
        GridValidation v;
        v.n_grid = static_cast<int>(as_integer(
            g.required("n_grid"), "grid_validation.n_grid", 2, 1'000'000));
        v.n_samples = as_integer(g.required("n_samples"),
                                 "grid_validation.n_samples", 2,
                                 1'000'000'000);
        g.finish();
        cfg.grid_validation = v;
    }

    root.finish();
    cfg.validate();
    return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_document(doc);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    try {
        return parse_config(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace loadshare
