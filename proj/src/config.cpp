#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "config_detail.hpp"
#include "steinbias/bounds.hpp"
#include "steinbias/errors.hpp"
#include "steinbias/permutation.hpp"
#include "steinbias/experiment.hpp"
#include "toml.hpp"

namespace steinbias {

std::string to_string(Construction c) {
    switch (c) {
        case Construction::zero_uniform: return "zero-uniform";
        case Construction::zero_cycle_type: return "zero-cycle-type";
        case Construction::zero_independent: return "zero-independent";
        case Construction::size_local: return "size-local";
        case Construction::size_independent: return "size-independent";
    }
    return "zero-uniform";
}

Construction parse_construction(const std::string& s) {
    for (auto c : {Construction::zero_uniform, Construction::zero_cycle_type, Construction::zero_independent,
                   Construction::size_local, Construction::size_independent}) {
        if (to_string(c) == s) return c;
    }
    throw ConfigError("construction: unknown value '" + s + "'");
}

bool ExperimentConfig::wants(const std::string& check) const {
    return checks.empty() || std::find(checks.begin(), checks.end(), check) != checks.end();
}

namespace {

const std::vector<std::string> kKnownChecks = {"characterizing", "gap",          "linearity",  "exchangeability",
                                               "oracle",         "moment-identity", "independence", "index-weights",
                                               "delta-proxy",    "delta-vs-bound"};

class Reader {
public:
    Reader(const toml::table& t, std::string where) : t_(t), where_(std::move(where)) {}

    std::string path(std::string_view key) const { return where_ + "." + std::string(key); }

    bool has(std::string_view key) const { return t_.contains(key); }

    std::optional<std::string> str(std::string_view key) const {
        auto node = t_[key];
        if (!node) return std::nullopt;
        if (auto v = node.value<std::string>()) return *v;
        throw ConfigError(path(key) + ": expected a string");
    }

    std::optional<double> real(std::string_view key) const {
        auto node = t_[key];
        if (!node) return std::nullopt;
        if (auto v = node.value<double>()) return *v;
        throw ConfigError(path(key) + ": expected a number");
    }

    std::optional<std::uint64_t> count(std::string_view key) const {
        auto node = t_[key];
        if (!node) return std::nullopt;
        auto v = node.value<std::int64_t>();
        if (!v || !node.is_integer()) throw ConfigError(path(key) + ": expected an integer");
        if (*v < 0) throw ConfigError(path(key) + ": must be nonnegative");
        return static_cast<std::uint64_t>(*v);
    }

    const toml::array* array(std::string_view key) const {
        auto node = t_[key];
        if (!node) return nullptr;
        if (!node.is_array()) throw ConfigError(path(key) + ": expected an array");
        return node.as_array();
    }

    std::vector<double> reals(std::string_view key) const {
        std::vector<double> out;
        if (auto* a = array(key)) {
            for (const auto& e : *a) {
                auto v = e.value<double>();
                if (!v) throw ConfigError(path(key) + ": expected an array of numbers");
                out.push_back(*v);
            }
        }
        return out;
    }

    std::vector<std::string> strings(std::string_view key) const {
        std::vector<std::string> out;
        if (auto* a = array(key)) {
            for (const auto& e : *a) {
                auto v = e.value<std::string>();
                if (!v) throw ConfigError(path(key) + ": expected an array of strings");
                out.push_back(*v);
            }
        }
        return out;
    }

    std::optional<Reader> sub(std::string_view key) const {
        auto node = t_[key];
        if (!node) return std::nullopt;
        if (!node.is_table()) throw ConfigError(path(key) + ": expected a table");
        return Reader(*node.as_table(), path(key));
    }

    const toml::table& table() const { return t_; }

private:
    const toml::table& t_;
    std::string where_;
};

nlohmann::json to_json(const toml::table& t) {
    std::ostringstream os;
    os << toml::json_formatter{t};
    return nlohmann::json::parse(os.str());
}

ExperimentConfig parse_table(const toml::table& t, const std::string& where) {
    Reader r(t, where);
    ExperimentConfig c;
    c.id = r.str("id").value_or(where);
    auto construction = r.str("construction");
    if (!construction) throw ConfigError(r.path("construction") + ": required");
    try {
        c.construction = parse_construction(*construction);
    } catch (const ConfigError& e) {
        throw ConfigError(where + "." + e.what());
    }
    c.reps = r.count("reps").value_or(c.reps);
    if (c.reps < 1) throw ConfigError(r.path("reps") + ": replicate count must be at least 1");
    c.seed = r.count("seed").value_or(c.seed);
    c.checks = r.strings("checks");
    for (const auto& k : c.checks) {
        if (std::find(kKnownChecks.begin(), kKnownChecks.end(), k) == kKnownChecks.end())
            throw ConfigError(r.path("checks") + ": unknown check '" + k + "'");
    }
    if (r.has("bounds")) c.bounds = r.strings("bounds");
    for (const auto& b : c.bounds) {
        try {
            parse_bound_variant(b);
        } catch (const ConfigError&) {
            throw ConfigError(r.path("bounds") + ": unknown variant '" + b + "'");
        }
    }
    c.z_threshold = r.real("z_threshold").value_or(c.z_threshold);
    if (!(c.z_threshold > 0.0)) throw ConfigError(r.path("z_threshold") + ": must be positive");

    const bool permutation = c.construction == Construction::zero_uniform || c.construction == Construction::zero_cycle_type;
    if (permutation) {
        auto p = r.sub("permutation");
        if (!p) throw ConfigError(r.path("permutation") + ": required for " + to_string(c.construction));
        c.n = p->count("n").value_or(0);
        if (c.n < 3) throw ConfigError(p->path("n") + ": must be at least 3");
        if (c.construction == Construction::zero_cycle_type) {
            const auto* ct = p->array("cycle_type");
            if (!ct) throw ConfigError(p->path("cycle_type") + ": required, as [[length, count], ...]");
            for (const auto& e : *ct) {
                const auto* pair = e.as_array();
                if (!pair || pair->size() != 2 || !(*pair)[0].is_integer() || !(*pair)[1].is_integer())
                    throw ConfigError(p->path("cycle_type") + ": entries must be [length, count] integer pairs");
                const auto len = (*pair)[0].value<std::int64_t>().value();
                const auto cnt = (*pair)[1].value<std::int64_t>().value();
                if (len < 1 || cnt < 0) throw ConfigError(p->path("cycle_type") + ": lengths >= 1, counts >= 0");
                c.cycle_type.emplace_back(static_cast<std::size_t>(len), static_cast<std::size_t>(cnt));
            }
            try {
                CycleType::from_pairs(c.n, c.cycle_type);
            } catch (const Error& e) {
                throw ConfigError(p->path("cycle_type") + ": " + e.what());
            }
        }
        if (auto s = r.sub("score")) {
            c.score_generator = s->str("generator").value_or(c.score_generator);
            if (c.score_generator != "gaussian" && c.score_generator != "uniform")
                throw ConfigError(s->path("generator") + ": must be 'gaussian' or 'uniform'");
            c.score_seed = s->count("seed").value_or(c.score_seed);
            if (auto csv = s->str("csv")) c.score_csv = *csv;
            if (const auto* rows = s->array("rows")) {
                for (const auto& row : *rows) {
                    const auto* ra = row.as_array();
                    if (!ra) throw ConfigError(s->path("rows") + ": expected an array of arrays");
                    std::vector<double> v;
                    for (const auto& x : *ra) {
                        auto d = x.value<double>();
                        if (!d) throw ConfigError(s->path("rows") + ": entries must be numbers");
                        v.push_back(*d);
                    }
                    c.score_rows.push_back(std::move(v));
                }
                if (c.score_rows.size() != c.n) throw ConfigError(s->path("rows") + ": need n rows");
                for (const auto& row : c.score_rows) {
                    if (row.size() != c.n) throw ConfigError(s->path("rows") + ": each row needs n entries");
                }
            }
        }
    }

    if (c.construction == Construction::size_local) {
        auto l = r.sub("local");
        if (!l) throw ConfigError(r.path("local") + ": required for size-local");
        auto kind = l->str("kind");
        if (!kind) throw ConfigError(l->path("kind") + ": required");
        try {
            c.local.kind = parse_local_kind(*kind);
        } catch (const ConfigError& e) {
            throw ConfigError(l->path("kind") + ": " + e.what());
        }
        c.local.n = l->count("n").value_or(0);
        c.local.m = l->count("m").value_or(0);
        c.local.p = l->count("p").value_or(0);
        c.local.payoff = l->str("payoff").value_or(c.local.payoff);
        for (double x : l->reals("pattern")) c.local.pattern.push_back(static_cast<std::uint32_t>(x));
        c.local.color_probs = l->reals("color_probs");
        for (double x : l->reals("target")) c.local.target.push_back(static_cast<std::uint32_t>(x));
        c.local.edge_probability = l->real("edge_probability").value_or(c.local.edge_probability);
        c.delta_outer = l->count("delta_outer").value_or(c.delta_outer);
        c.delta_inner = l->count("delta_inner").value_or(c.delta_inner);
        try {
            LocalStatModel check(c.local);
        } catch (const Error& e) {
            throw ConfigError(l->path("kind") + ": " + e.what());
        }
    }

    if (c.construction == Construction::zero_independent || c.construction == Construction::size_independent) {
        auto ind = r.sub("independent");
        const toml::array* groups = ind ? ind->array("summand") : nullptr;
        if (!groups || groups->empty())
            throw ConfigError(r.path("independent.summand") + ": at least one [[independent.summand]] required");
        std::size_t k = 0;
        for (const auto& g : *groups) {
            if (!g.is_table()) throw ConfigError(ind->path("summand") + ": expected tables");
            Reader gr(*g.as_table(), ind->path("summand[" + std::to_string(k++) + "]"));
            auto values = gr.reals("values");
            auto probs = gr.reals("probs");
            if (values.empty() || values.size() != probs.size())
                throw ConfigError(gr.path("values") + ": values and probs must be nonempty and of equal length");
            try {
                c.summands.push_back({DiscreteLaw(values, probs), gr.count("count").value_or(1)});
            } catch (const Error& e) {
                throw ConfigError(gr.path("probs") + ": " + e.what());
            }
        }
    }

    if (auto s = r.sub("sweep")) {
        c.sweep_key = s->str("key");
        c.sweep_values = s->reals("values");
        if (!c.sweep_key || c.sweep_values.empty()) throw ConfigError(s->path("values") + ": key and nonempty values required");
    }
    c.echo = to_json(t);
    return c;
}

toml::table parse_text(const std::string& text, const std::string& where) {
    try {
        return toml::parse(text, where);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << where << ":" << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
}

}  // namespace

ExperimentConfig parse_experiment(const std::string& toml_text, const std::string& where) {
    return parse_table(parse_text(toml_text, where), where);
}

namespace detail {

toml::table read_config_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path.string());
}

/// Tables of the experiments in a file, with their names.
std::vector<std::pair<toml::table, std::string>> experiment_tables(const std::filesystem::path& path) {
    auto root = read_config_table(path);
    std::vector<std::pair<toml::table, std::string>> out;
    if (auto* arr = root["experiment"].as_array()) {
        std::size_t k = 0;
        for (auto& e : *arr) {
            if (!e.is_table()) throw ConfigError(path.string() + ": experiment entries must be tables");
            out.emplace_back(*e.as_table(), path.stem().string() + ".experiment[" + std::to_string(k++) + "]");
        }
    } else {
        out.emplace_back(root, path.stem().string());
    }
    return out;
}

ExperimentConfig parse_config_table(const toml::table& t, const std::string& where) { return parse_table(t, where); }

void set_dotted(toml::table& root, const std::string& key, double value) {
    toml::table* cur = &root;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            if (value == std::floor(value) && std::abs(value) < 9e15)
                cur->insert_or_assign(part, static_cast<std::int64_t>(value));
            else
                cur->insert_or_assign(part, value);
            return;
        }
        if (!cur->contains(part)) cur->insert(part, toml::table{});
        cur = (*cur)[part].as_table();
        if (!cur) throw ConfigError("sweep key '" + key + "': '" + part + "' is not a table");
        start = dot + 1;
    }
}

}  // namespace detail

std::vector<ExperimentConfig> load_experiments(const std::filesystem::path& path) {
    std::vector<ExperimentConfig> out;
    for (const auto& [t, where] : detail::experiment_tables(path)) out.push_back(parse_table(t, where));
    return out;
}

}  // namespace steinbias
