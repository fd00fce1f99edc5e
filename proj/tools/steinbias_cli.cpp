#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "steinbias/bounds.hpp"
#include "steinbias/errors.hpp"
#include "steinbias/experiment.hpp"
#include "steinbias/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace steinbias;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::size_t threads = 0;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* app, Common& c, bool needs_config) {
    auto* opt = app->add_option("--config", c.config, "Experiment config (TOML)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "Master seed (overrides the config)");
    app->add_option("--reps", c.reps, "Replicate count (overrides the config)");
    app->add_option("--threads", c.threads, "Worker threads (default: hardware threads)");
    app->add_option("--out", c.out, "Output directory (default: $STEINBIAS_OUT_DIR, then ./steinbias-out)");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

fs::path out_dir(const Common& c) {
    fs::path dir = "steinbias-out";
    if (const char* env = std::getenv("STEINBIAS_OUT_DIR"); env && *env) dir = env;
    if (!c.out.empty()) dir = c.out;
    fs::create_directories(dir);
    return dir;
}

std::vector<ExperimentConfig> experiments(const Common& c) {
    auto list = load_experiments(c.config);
    for (auto& e : list) {
        if (c.seed) e.seed = *c.seed;
        if (c.reps) {
            if (*c.reps < 1) throw ConfigError("--reps: replicate count must be at least 1");
            e.reps = *c.reps;
        }
    }
    return list;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string() + ": cannot write");
    out << text;
}

int cmd_verify(const Common& c) {
    const auto dir = out_dir(c);
    bool pass = true;
    std::ofstream checks(dir / "checks.jsonl");
    for (const auto& e : experiments(c)) {
        const auto report = run(e, c.threads);
        std::cout << format_report_table(report) << std::flush;
        if (c.format == "json") write_file(dir / (e.id + ".report.json"), report.dump(2) + "\n");
        else write_file(dir / (e.id + ".report.csv"), format_report_csv(report));
        for (const auto& ch : report["checks"]) {
            json line = ch;
            line["id"] = e.id;
            checks << line.dump() << "\n";
        }
        pass = pass && report["pass"].get<bool>();
    }
    return pass ? kOk : kCheckFailure;
}

int cmd_simulate(const Common& c, bool spool) {
    const auto dir = out_dir(c);
    for (const auto& e : experiments(c)) {
        if (spool) {
            write_spool(e, dir / (e.id + ".draws.bin"));
            std::cout << e.id << ": " << e.reps << " draws -> " << (dir / (e.id + ".draws.bin")).string() << "\n";
            continue;
        }
        const auto draws = simulate(e, c.threads);
        std::ostringstream os;
        os.precision(17);
        if (c.format == "csv") {
            os << "y,y_biased,gap\n";
            for (const auto& d : draws) os << d.y << "," << d.y_biased << "," << d.gap << "\n";
        } else {
            for (const auto& d : draws) os << json{{"y", d.y}, {"y_biased", d.y_biased}, {"gap", d.gap}}.dump() << "\n";
        }
        const auto path = dir / (e.id + (c.format == "csv" ? ".draws.csv" : ".draws.jsonl"));
        write_file(path, os.str());
        std::cout << e.id << ": " << draws.size() << " draws -> " << path.string() << "\n";
    }
    return kOk;
}

struct GenericBound {
    std::string kind = "zero";
    double sigma = 0.0, B = 0.0, mu = 0.0, delta = 0.0;
    std::string cls = "half-lines";
    double a = 0.0;
    std::string variant = "main";
};

int cmd_bound(const Common& c, const GenericBound& g) {
    json out = json::array();
    if (!c.config.empty()) {
        for (const auto& e : experiments(c)) out.push_back(bounds_only(e, c.threads));
    } else {
        SmoothnessClass cls = g.cls == "intervals" ? SmoothnessClass::intervals()
                              : g.cls == "custom"  ? SmoothnessClass::custom(g.a)
                                                   : SmoothnessClass::half_lines();
        const auto v = parse_bound_variant(g.variant);
        const auto r = g.kind == "zero" ? zero_bias_bound(g.sigma, g.B, cls, v)
                                        : size_bias_bound(g.mu, g.sigma, g.B, g.delta, cls, v);
        if (c.format == "csv") {
            std::cout << BoundReport::csv_header() << "\n" << r.csv_row() << "\n";
            return kOk;
        }
        out.push_back({{"bounds", json::array({r.to_json()})}});
    }
    if (c.format == "csv") {
        std::cout << "id," << BoundReport::csv_header() << "\n";
        for (const auto& e : out) {
            for (const auto& b : e["bounds"]) {
                BoundReport r;
                r.formula = b["formula"];
                r.delta_bound = b["delta_bound"];
                r.A = b["A"];
                r.B = b["B"];
                r.a = b["a"];
                if (!b["mu"].is_null()) r.mu = b["mu"].get<double>();
                r.sigma = b["sigma"];
                if (!b["Delta"].is_null()) r.Delta = b["Delta"].get<double>();
                r.precondition_ok = b["precondition_ok"];
                r.precondition_text = b["precondition_text"];
                std::cout << e["id"].get<std::string>() << "," << r.csv_row() << "\n";
            }
        }
    } else {
        std::cout << out.dump(2) << "\n";
    }
    return kOk;
}

int cmd_sweep(const Common& c, std::string key, std::vector<double> values) {
    if (key.empty() || values.empty()) {
        const auto e = load_experiments(c.config).front();
        if (!e.sweep_key) throw ConfigError(c.config + ": no [sweep] table and no --key/--values given");
        key = *e.sweep_key;
        values = e.sweep_values;
    }
    const auto rows = sweep(c.config, key, values, c.seed, c.reps, c.threads);
    std::ostringstream csv;
    csv << sweep_csv_header() << "\n";
    bool pass = true;
    json reports = json::array();
    for (const auto& r : rows) {
        csv << sweep_csv_row(r) << "\n";
        pass = pass && r.report && (*r.report)["pass"].get<bool>();
        reports.push_back(r.report ? *r.report : json{{"key", r.key}, {"value", r.value}, {"error", r.error}});
    }
    std::cout << csv.str();
    const auto dir = out_dir(c);
    const auto stem = fs::path(c.config).stem().string();
    write_file(dir / (stem + ".sweep.csv"), csv.str());
    if (c.format == "json") write_file(dir / (stem + ".sweep.json"), reports.dump(2) + "\n");
    return pass ? kOk : kCheckFailure;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& format) {
    bool pass = true;
    for (const auto& in : inputs) {
        std::ifstream f(in);
        if (!f) throw ConfigError(in + ": cannot open");
        std::vector<json> reports;
        std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        try {
            auto j = json::parse(text);
            if (j.is_array()) reports.assign(j.begin(), j.end());
            else reports.push_back(j);
        } catch (const json::parse_error&) {
            std::istringstream lines(text);
            for (std::string line; std::getline(lines, line);) {
                if (!line.empty()) reports.push_back(json::parse(line));
            }
        }
        for (const auto& r : reports) {
            if (!r.contains("checks")) continue;  // sweep rows that errored
            std::cout << (format == "csv" ? format_report_csv(r) : format_report_table(r));
            pass = pass && r["pass"].get<bool>();
        }
    }
    return pass ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-bias and size-bias couplings: simulation, verification and Berry-Esseen bounds"};
    app.require_subcommand(1);

    Common verify_opts, simulate_opts, bound_opts, sweep_opts;
    auto* verify = app.add_subcommand("verify", "Run the check suites of every experiment in a config");
    add_common(verify, verify_opts, true);

    auto* simulate_cmd = app.add_subcommand("simulate", "Write coupled draw streams");
    add_common(simulate_cmd, simulate_opts, true);
    bool spool = false;
    simulate_cmd->add_flag("--spool", spool, "Binary spool of full zero-bias draws (permutation constructions)");

    auto* bound = app.add_subcommand("bound", "Evaluate bound formulas only");
    add_common(bound, bound_opts, false);
    GenericBound g;
    bound->add_option("--kind", g.kind, "zero or size (without --config)")->check(CLI::IsMember({"zero", "size"}));
    bound->add_option("--sigma", g.sigma, "sigma");
    bound->add_option("-B,--B", g.B, "coupling constant B");
    bound->add_option("--mu", g.mu, "mean (size bias)");
    bound->add_option("--delta", g.delta, "Delta (size bias)");
    bound->add_option("--class", g.cls, "function class")->check(CLI::IsMember({"half-lines", "intervals", "custom"}));
    bound->add_option("--a", g.a, "smoothing constant for --class custom");
    bound->add_option("--variant", g.variant, "main, half-line, interval or alt");

    auto* sweep_cmd = app.add_subcommand("sweep", "One run per grid value of a config key");
    add_common(sweep_cmd, sweep_opts, true);
    std::string key;
    std::vector<double> values;
    sweep_cmd->add_option("--key", key, "Dotted config key, e.g. local.n (default: the [sweep] table)");
    sweep_cmd->add_option("--values", values, "Grid values")->delimiter(',');

    auto* report = app.add_subcommand("report", "Reformat stored reports");
    std::vector<std::string> inputs;
    std::string report_format = "table";
    report->add_option("inputs", inputs, "Report files (.json, .jsonl, sweep .json)")->required()->check(CLI::ExistingFile);
    report->add_option("--format", report_format, "table or csv")->check(CLI::IsMember({"table", "csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*verify) return cmd_verify(verify_opts);
        if (*simulate_cmd) return cmd_simulate(simulate_opts, spool);
        if (*bound) {
            if (bound_opts.config.empty() && !(g.sigma > 0.0 && g.B > 0.0))
                throw ConfigError("bound: give --config, or --sigma and --B (and --mu for --kind size)");
            return cmd_bound(bound_opts, g);
        }
        if (*sweep_cmd) return cmd_sweep(sweep_opts, key, values);
        if (*report) return cmd_report(inputs, report_format == "csv" ? "csv" : "table");
    } catch (const steinbias::Error& e) {
        std::cerr << "error (" << e.category() << "): " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
