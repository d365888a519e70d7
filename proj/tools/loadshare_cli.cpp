// loadshare_cli.cpp: command-line front end. Exit codes: 0 ok, 2 config
// error, 3 data error, 4 internal error. Every file lands inside --out, and
// every random draw flows from the config seed or --seed; there is no
// wall-clock seeding anywhere.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadshare/allocation.hpp"
#include "loadshare/config.hpp"
#include "loadshare/csv_io.hpp"
#include "loadshare/errors.hpp"
#include "loadshare/newsvendor.hpp"
#include "loadshare/sim.hpp"

namespace fs = std::filesystem;

using namespace loadshare;

namespace {

void apply_engine_override(ScenarioConfig& cfg, const std::string& engine) {
    if (engine.empty()) return;
    if (engine == "analytical") {
        cfg.expectation_engine = EngineConfig::Kind::analytical;
        return;
    }
    if (engine.rfind("mc:", 0) == 0) {
        const std::string digits = engine.substr(3);
        std::int64_t n = 0;
        const auto [ptr, ec] =
            std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc() && ptr == digits.data() + digits.size() &&
            n >= 2) {
            cfg.expectation_engine = EngineConfig::Kind::monte_carlo;
            cfg.mc_samples = n;
            return;
        }
    }
    throw ConfigError("--engine: expected 'analytical' or 'mc:<n>' with n >= 2");
}

std::vector<AllocationMethod> parse_methods(const std::string& csv) {
    std::vector<AllocationMethod> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t pos = csv.find(',', start);
        const std::string name =
            csv.substr(start, pos == std::string::npos ? pos : pos - start);
        if (name == "shapley")
            out.push_back(AllocationMethod::shapley);
        else if (name == "nucleolus")
            out.push_back(AllocationMethod::nucleolus);
        else
            throw ConfigError("--methods: unknown method '" + name + "'");
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string engine_label(const ScenarioConfig& cfg) {
    if (cfg.expectation_engine == EngineConfig::Kind::analytical)
        return "analytical";
    return "mc:" + std::to_string(cfg.mc_samples);
}

void write_metadata(const fs::path& path, const ScenarioConfig& cfg,
                    const AggregateReport& agg, int threads,
                    std::int64_t comparison_samples) {
    nlohmann::ordered_json meta;
    meta["tool"] = "loadshare";
    meta["version"] = LOADSHARE_VERSION;
    meta["seed"] = cfg.master_seed;
    meta["customers"] = cfg.customers;
    meta["horizon"] = cfg.horizon;
    meta["timestep_minutes"] = cfg.timestep_minutes;
    meta["engine"] = engine_label(cfg);
    std::vector<std::string> methods;
    for (AllocationMethod m : cfg.allocation_methods)
        methods.emplace_back(to_string(m));
    meta["allocation_methods"] = methods;
    meta["comparison_samples_per_timestep"] = comparison_samples;
    meta["threads"] = threads;
    meta["tolerances"] = {{"efficiency_relative", 1e-7},
                          {"lp_feasibility", 1e-7},
                          {"lp_pivot", 1e-9},
                          {"individual_rationality", 1e-9}};
    meta["savings_attribution"] =
        "customer consumption = disclosed schedulable load + unschedulable "
        "mean; savings fraction = payoff / (r_r * consumption)";
    meta["counters"] = {
        {"monotonicity_violations", agg.monotonicity_violations},
        {"negative_disclosures", agg.negative_disclosures},
        {"negative_quantities", agg.negative_quantities},
        {"nucleolus_skipped_timesteps", agg.nucleolus_skipped_timesteps}};
    meta["warnings"] = agg.warnings;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

struct SimulateArgs {
    std::string config_path;
    std::string out_dir;
    std::string profiles_path;
    bool synthetic = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string engine;
    int threads = 1;
    std::int64_t comparison_samples = 100;
};

int cmd_simulate(const SimulateArgs& args) {
    ScenarioConfig cfg = load_config(args.config_path);
    if (args.seed_set) cfg.master_seed = args.seed;
    apply_engine_override(cfg, args.engine);
    cfg.validate();
    if (args.threads < 1) throw ConfigError("--threads: must be at least 1");
    if (args.comparison_samples < 2)
        throw ConfigError("--comparison-samples: must be at least 2");
    if (args.synthetic == !args.profiles_path.empty())
        throw ConfigError(
            "simulate: provide exactly one of --synthetic or --profiles");

    const LoadMatrix profiles =
        args.synthetic
            ? synthesize_profiles(cfg.customers, cfg.horizon, cfg.master_seed,
                                  cfg.steps_per_day())
            : ingest_profiles(args.profiles_path, cfg.customers);

    const HorizonResult result = run_horizon(cfg, profiles);
    const MethodComparison cmp =
        method_comparison(cfg, profiles, args.comparison_samples);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    write_allocations_csv((out / "allocations.csv").string(), result.timesteps);
    write_aggregate_csv((out / "aggregate.csv").string(), result.aggregate);
    write_forecast_band_csv((out / "forecast_band.csv").string(),
                            result.timesteps);
    write_method_comparison_csv((out / "method_comparison.csv").string(), cmp);
    write_metadata(out / "run_metadata.json", cfg, result.aggregate,
                   args.threads, args.comparison_samples);

    for (const std::string& w : result.aggregate.warnings)
        std::cerr << "warning: " << w << '\n';
    std::cout << "simulate: " << cfg.horizon << " timesteps, "
              << cfg.customers << " customers, seed " << cfg.master_seed
              << ", outputs in " << out.string() << '\n';
    return 0;
}

struct AllocateArgs {
    std::string table_path;
    std::string methods = "shapley,nucleolus";
    std::string out_dir;
};

int cmd_allocate(const AllocateArgs& args) {
    const ValueTable table = read_value_table(args.table_path);
    const std::vector<AllocationMethod> methods = parse_methods(args.methods);
    std::vector<Allocation> allocations;
    for (AllocationMethod m : methods) {
        if (m == AllocationMethod::nucleolus && table.player_count() > 12)
            throw ConfigError(
                "nucleolus supports at most 12 players; rerun with --methods "
                "shapley");
        allocations.push_back(m == AllocationMethod::shapley
                                  ? shapley(table)
                                  : nucleolus(table));
    }

    std::cout << "method,player,payoff\n";
    for (const Allocation& a : allocations)
        for (std::size_t i = 0; i < a.x.size(); ++i)
            std::cout << to_string(a.method) << ',' << i << ','
                      << format_double(a.x[i]) << '\n';

    if (!args.out_dir.empty()) {
        const fs::path out(args.out_dir);
        fs::create_directories(out);
        std::ofstream file(out / "table_allocations.csv", std::ios::binary);
        if (!file) throw DataError("table_allocations.csv: cannot open");
        file << "method,player,payoff\n";
        for (const Allocation& a : allocations)
            for (std::size_t i = 0; i < a.x.size(); ++i)
                file << to_string(a.method) << ',' << i << ','
                     << format_double(a.x[i]) << '\n';
        if (!file) throw DataError("table_allocations.csv: write failed");
    }
    return 0;
}

struct NewsvendorArgs {
    double r_r = 0.0;
    double r_w = 0.0;
    double b_minus = 0.0;
    double b_plus = 0.0;
    double mean = 0.0;
    double std = 0.0;
    bool grid = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_newsvendor(const NewsvendorArgs& args) {
    Prices prices(0.1, 0.06, 0.16, 0.03);
    try {
        prices = Prices(args.r_r, args.r_w, args.b_minus, args.b_plus);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("prices: ") + e.what());
    }
    if (!(std::isfinite(args.std) && args.std >= 0.0))
        throw ConfigError("--std: must be finite and nonnegative");
    if (!std::isfinite(args.mean))
        throw ConfigError("--mean: must be finite");

    const GaussianDist forecast(args.mean, args.std * args.std);
    double gamma = 0.0;
    QuantityDecision decision;
    try {
        gamma = cost_ratio(prices);
        decision = optimal_quantity(forecast, prices);
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("degenerate pricing: ") + e.what());
    }
    const double expected =
        expected_profit_analytical(decision.quantity, forecast, prices);

    std::cout << "gamma = " << format_double(gamma) << '\n';
    std::cout << "q_star = " << format_double(decision.quantity) << '\n';
    std::cout << "expected_profit = " << format_double(expected) << '\n';

    if (args.grid) {
        if (!args.seed_set)
            throw ConfigError("--grid requires --seed for its Monte Carlo draws");
        if (!(args.mean > 0.0))
            throw ConfigError("--grid requires a positive forecast mean");
        const double upper = 2.0 * args.mean;
        const QuantityDecision g = grid_search_quantity(
            forecast, prices, 100, 1000, upper, args.seed);
        std::cout << "grid_q = " << format_double(g.quantity) << '\n';
        std::cout << "grid_step = " << format_double(upper / 99.0) << '\n';
    }
    return 0;
}

struct GenDataArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_gen_data(const GenDataArgs& args) {
    ScenarioConfig cfg = load_config(args.config_path);
    if (args.seed_set) cfg.master_seed = args.seed;
    const LoadMatrix profiles = synthesize_profiles(
        cfg.customers, cfg.horizon, cfg.master_seed, cfg.steps_per_day());
    const fs::path out(args.out_dir);
    fs::create_directories(out);
    write_profiles_csv((out / "profiles.csv").string(), profiles);
    std::cout << "gen-data: wrote " << cfg.horizon << " x " << cfg.customers
              << " profile rows to " << (out / "profiles.csv").string()
              << '\n';
    return 0;
}

struct ValidateArgs {
    std::string config_path;
    std::string profiles_path;
};

int cmd_validate(const ValidateArgs& args) {
    const ScenarioConfig cfg = load_config(args.config_path);
    if (!args.profiles_path.empty()) {
        const LoadMatrix profiles =
            ingest_profiles(args.profiles_path, cfg.customers);
        if (static_cast<int>(profiles.size()) != cfg.horizon)
            throw DataError("profiles: expected " +
                            std::to_string(cfg.horizon) + " timesteps, got " +
                            std::to_string(profiles.size()));
    }
    std::cout << "ok\n";
    return 0;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loadshare: schedulable-load data sharing simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(LOADSHARE_VERSION));

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand(
        "simulate", "Run the horizon simulation and write the report suite");
    sim->add_option("--config", sim_args.config_path, "Scenario config JSON")
        ->required();
    sim->add_option("--out", sim_args.out_dir, "Output directory")->required();
    sim->add_option("--profiles", sim_args.profiles_path,
                    "Load profile CSV (timestep,customer_id,load_kwh)");
    sim->add_flag("--synthetic", sim_args.synthetic,
                  "Synthesize profiles from the config seed");
    CLI::Option* sim_seed =
        sim->add_option("--seed", sim_args.seed, "Master seed override");
    sim->add_option("--engine", sim_args.engine,
                    "Expectation engine: analytical | mc:<n>");
    sim->add_option("--threads", sim_args.threads, "Parallelism cap");
    sim->add_option("--comparison-samples", sim_args.comparison_samples,
                    "Profit samples per timestep per comparison arm");

    AllocateArgs alloc_args;
    CLI::App* alloc = app.add_subcommand(
        "allocate", "Allocate payoffs over a value-table CSV");
    alloc->add_option("--table", alloc_args.table_path,
                      "Value table CSV (mask,members,value)")
        ->required();
    alloc->add_option("--methods", alloc_args.methods,
                      "Comma-separated: shapley,nucleolus");
    alloc->add_option("--out", alloc_args.out_dir,
                      "Also write table_allocations.csv here");

    NewsvendorArgs nv_args;
    CLI::App* nv = app.add_subcommand(
        "newsvendor", "Print the cost ratio and optimal purchase");
    nv->add_option("--r-r", nv_args.r_r, "Retail price")->required();
    nv->add_option("--r-w", nv_args.r_w, "Wholesale price")->required();
    nv->add_option("--b-minus", nv_args.b_minus, "Shortage imbalance price")
        ->required();
    nv->add_option("--b-plus", nv_args.b_plus, "Surplus imbalance price")
        ->required();
    nv->add_option("--mean", nv_args.mean, "Forecast mean")->required();
    nv->add_option("--std", nv_args.std, "Forecast standard deviation")
        ->required();
    nv->add_flag("--grid", nv_args.grid,
                 "Also run the Monte Carlo grid search");
    CLI::Option* nv_seed =
        nv->add_option("--seed", nv_args.seed, "Seed for --grid");

    GenDataArgs gen_args;
    CLI::App* gen = app.add_subcommand(
        "gen-data", "Write synthetic profiles.csv for a config");
    gen->add_option("--config", gen_args.config_path, "Scenario config JSON")
        ->required();
    gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
    CLI::Option* gen_seed =
        gen->add_option("--seed", gen_args.seed, "Master seed override");

    ValidateArgs val_args;
    CLI::App* val = app.add_subcommand(
        "validate", "Check a config (and optionally a profile CSV)");
    val->add_option("--config", val_args.config_path, "Scenario config JSON")
        ->required();
    val->add_option("--profiles", val_args.profiles_path,
                    "Load profile CSV to cross-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    sim_args.seed_set = sim_seed->count() > 0;
    nv_args.seed_set = nv_seed->count() > 0;
    gen_args.seed_set = gen_seed->count() > 0;

    if (sim->parsed()) return run_guarded([&] { return cmd_simulate(sim_args); });
    if (alloc->parsed())
        return run_guarded([&] { return cmd_allocate(alloc_args); });
    if (nv->parsed())
        return run_guarded([&] { return cmd_newsvendor(nv_args); });
    if (gen->parsed())
        return run_guarded([&] { return cmd_gen_data(gen_args); });
    if (val->parsed())
        return run_guarded([&] { return cmd_validate(val_args); });
    return 4;  // unreachable: require_subcommand(1)
}
