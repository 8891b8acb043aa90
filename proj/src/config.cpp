#include "fgan/config.hpp"

#include <fstream>
#include <sstream>

namespace fgan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& path,
                       const std::string& what) {
    throw ConfigError(source + ": field '" + path + "': " + what);
}

json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(source + ": line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
}

/// Field accessor that reports the full path of whatever went wrong.
struct Ctx {
    const json& j;
    std::string source;
    std::string path;

    Ctx field(const char* key) const {
        if (!j.is_object()) fail(source, path, "expected an object");
        auto it = j.find(key);
        if (it == j.end()) fail(source, path.empty() ? key : path + "." + key, "missing");
        return Ctx{*it, source, path.empty() ? key : path + "." + key};
    }
    std::optional<Ctx> optional_field(const char* key) const {
        if (!j.is_object()) fail(source, path, "expected an object");
        auto it = j.find(key);
        if (it == j.end()) return std::nullopt;
        return Ctx{*it, source, path.empty() ? key : path + "." + key};
    }
    template <typename T>
    T get() const {
        try {
            return j.get<T>();
        } catch (const json::exception& e) {
            fail(source, path, e.what());
        }
    }
    template <typename T>
    T get_or(const char* key, T fallback) const {
        auto f = optional_field(key);
        return f ? f->get<T>() : fallback;
    }
};

void check_known_keys(const Ctx& c, std::initializer_list<const char*> known) {
    if (!c.j.is_object()) fail(c.source, c.path, "expected an object");
    for (auto it = c.j.begin(); it != c.j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) fail(c.source, c.path.empty() ? it.key() : c.path + "." + it.key(),
                      "unknown field");
    }
}

GaussianMixture1 parse_mixture(const Ctx& c) {
    check_known_keys(c, {"components"});
    GaussianMixture1 mix;
    Ctx comps = c.field("components");
    if (!comps.j.is_array() || comps.j.empty())
        fail(c.source, comps.path, "expected a non-empty array");
    for (std::size_t i = 0; i < comps.j.size(); ++i) {
        Ctx comp{comps.j[i], c.source, comps.path + "[" + std::to_string(i) + "]"};
        check_known_keys(comp, {"weight", "mean", "std"});
        GaussianMixture1::Component out;
        out.weight = comp.field("weight").get<double>();
        std::vector<double> mean = comp.field("mean").get<std::vector<double>>();
        out.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        out.std_dev = comp.field("std").get<double>();
        if (out.weight <= 0.0) fail(c.source, comp.path + ".weight", "must be positive");
        if (out.std_dev <= 0.0) fail(c.source, comp.path + ".std", "must be positive");
        mix.components.push_back(std::move(out));
    }
    return mix;
}

TaskVariant parse_task(const Ctx& c) {
    std::string kind = c.field("kind").get<std::string>();
    if (kind == "paired_categorical") {
        check_known_keys(c, {"kind", "class_count", "coupling", "emission_radius", "emission_std"});
        PairedCategoricalTask t;
        t.class_count = c.get_or("class_count", t.class_count);
        t.coupling = c.get_or("coupling", t.coupling);
        t.emission_radius = c.get_or("emission_radius", t.emission_radius);
        t.emission_std = c.get_or("emission_std", t.emission_std);
        if (t.class_count < 2) fail(c.source, c.path + ".class_count", "must be >= 2");
        if (t.coupling < 0.0 || t.coupling > 1.0)
            fail(c.source, c.path + ".coupling", "must be a probability");
        if (t.emission_std <= 0.0) fail(c.source, c.path + ".emission_std", "must be positive");
        return t;
    }
    if (kind == "gaussian") {
        check_known_keys(c, {"kind", "mean", "cov", "partition"});
        std::vector<double> mean = c.field("mean").get<std::vector<double>>();
        auto cov_rows = c.field("cov").get<std::vector<std::vector<double>>>();
        auto parts = c.field("partition").get<std::vector<std::vector<int>>>();
        const auto d = static_cast<Eigen::Index>(mean.size());
        Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(mean.data(), d);
        Eigen::MatrixXd cov(d, d);
        if (static_cast<Eigen::Index>(cov_rows.size()) != d)
            fail(c.source, c.path + ".cov", "must be square and match mean length");
        for (Eigen::Index r = 0; r < d; ++r) {
            if (static_cast<Eigen::Index>(cov_rows[r].size()) != d)
                fail(c.source, c.path + ".cov", "must be square and match mean length");
            for (Eigen::Index k = 0; k < d; ++k) cov(r, k) = cov_rows[r][k];
        }
        try {
            return GaussianTask(std::move(mu), std::move(cov),
                                Partition::make(std::move(parts), static_cast<int>(d)));
        } catch (const std::exception& e) {
            fail(c.source, c.path, e.what());
        }
    }
    if (kind == "additive_mixture") {
        check_known_keys(c, {"kind", "source_a", "source_v"});
        AdditiveMixtureTask t;
        t.source_a = parse_mixture(c.field("source_a"));
        t.source_v = parse_mixture(c.field("source_v"));
        if (t.source_a.dim() != t.source_v.dim() || t.source_a.dim() < 1)
            fail(c.source, c.path, "sources must share a positive dimension");
        for (const auto& comp : t.source_a.components)
            if (comp.mean.size() != t.source_a.dim())
                fail(c.source, c.path + ".source_a", "component dimensions differ");
        for (const auto& comp : t.source_v.components)
            if (comp.mean.size() != t.source_v.dim())
                fail(c.source, c.path + ".source_v", "component dimensions differ");
        return t;
    }
    fail(c.source, c.path + ".kind", "unknown task kind '" + kind + "'");
}

json task_to_json(const TaskVariant& task) {
    json j;
    if (const auto* cat = std::get_if<PairedCategoricalTask>(&task)) {
        j["kind"] = "paired_categorical";
        j["class_count"] = cat->class_count;
        j["coupling"] = cat->coupling;
        j["emission_radius"] = cat->emission_radius;
        j["emission_std"] = cat->emission_std;
    } else if (const auto* g = std::get_if<GaussianTask>(&task)) {
        j["kind"] = "gaussian";
        std::vector<double> mean(g->mean().data(), g->mean().data() + g->mean().size());
        j["mean"] = mean;
        std::vector<std::vector<double>> cov(static_cast<std::size_t>(g->cov().rows()),
                                             std::vector<double>(g->cov().cols()));
        for (Eigen::Index r = 0; r < g->cov().rows(); ++r)
            for (Eigen::Index k = 0; k < g->cov().cols(); ++k)
                cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = g->cov()(r, k);
        j["cov"] = cov;
        j["partition"] = g->partition().parts;
    } else if (const auto* m = std::get_if<AdditiveMixtureTask>(&task)) {
        j["kind"] = "additive_mixture";
        auto mixture_json = [](const GaussianMixture1& mix) {
            json out;
            out["components"] = json::array();
            for (const auto& comp : mix.components) {
                json cj;
                cj["weight"] = comp.weight;
                cj["mean"] = std::vector<double>(comp.mean.data(),
                                                 comp.mean.data() + comp.mean.size());
                cj["std"] = comp.std_dev;
                out["components"].push_back(cj);
            }
            return out;
        };
        j["source_a"] = mixture_json(m->source_a);
        j["source_v"] = mixture_json(m->source_v);
    }
    return j;
}

ExperimentConfig parse_experiment(const Ctx& root) {
    check_known_keys(root, {"schema_version", "seed", "out_dir", "task", "model_kind",
                            "combination_mode", "hierarchy", "autoregressive_order",
                            "generator_output", "train", "data", "eval"});
    ExperimentConfig cfg;
    cfg.schema_version = root.field("schema_version").get<int>();
    if (cfg.schema_version != 1)
        fail(root.source, "schema_version",
             "unsupported version " + std::to_string(cfg.schema_version));
    cfg.task = parse_task(root.field("task"));
    cfg.train.seed = root.get_or<std::uint64_t>("seed", 0);
    cfg.out_dir = root.get_or<std::string>("out_dir", "");

    try {
        cfg.train.model_kind =
            model_kind_from_string(root.get_or<std::string>("model_kind", "factorgan"));
    } catch (const std::exception& e) {
        fail(root.source, "model_kind", e.what());
    }
    try {
        cfg.train.combination_mode =
            combination_mode_from_string(root.get_or<std::string>("combination_mode", "joint"));
    } catch (const std::exception& e) {
        fail(root.source, "combination_mode", e.what());
    }
    if (auto h = root.optional_field("hierarchy")) {
        HierarchySpec spec;
        spec.sub_parts_per_part = h->get<std::vector<std::vector<std::vector<int>>>>();
        cfg.hierarchy = std::move(spec);
    }
    if (auto a = root.optional_field("autoregressive_order")) {
        AutoregressiveSpec spec;
        spec.ordered_parts = a->get<std::vector<std::vector<int>>>();
        spec.total_dim = task_partition(cfg.task).total_dim;
        cfg.autoregressive = std::move(spec);
    }
    if (auto g = root.optional_field("generator_output")) {
        try {
            cfg.generator_output = generator_output_from_string(g->get<std::string>());
        } catch (const std::exception& e) {
            fail(root.source, g->path, e.what());
        }
    }

    if (auto t = root.optional_field("train")) {
        check_known_keys(*t, {"lr", "batch_size", "disc_updates_per_gen_update",
                              "total_gen_steps", "noise_dim", "gen_hidden", "disc_hidden",
                              "spectral_power_iterations"});
        cfg.train.lr = t->get_or("lr", cfg.train.lr);
        cfg.train.batch_size = t->get_or("batch_size", cfg.train.batch_size);
        cfg.train.disc_updates_per_gen_update =
            t->get_or("disc_updates_per_gen_update", cfg.train.disc_updates_per_gen_update);
        cfg.train.total_gen_steps = t->get_or("total_gen_steps", cfg.train.total_gen_steps);
        cfg.train.noise_dim = t->get_or("noise_dim", cfg.train.noise_dim);
        cfg.train.gen_hidden = t->get_or("gen_hidden", cfg.train.gen_hidden);
        cfg.train.disc_hidden = t->get_or("disc_hidden", cfg.train.disc_hidden);
        cfg.train.spectral_power_iterations =
            t->get_or("spectral_power_iterations", cfg.train.spectral_power_iterations);
        if (cfg.train.lr <= 0.0) fail(root.source, "train.lr", "must be positive");
        if (cfg.train.batch_size < 1) fail(root.source, "train.batch_size", "must be positive");
        if (cfg.train.disc_updates_per_gen_update < 1)
            fail(root.source, "train.disc_updates_per_gen_update", "must be positive");
        if (cfg.train.total_gen_steps < 0)
            fail(root.source, "train.total_gen_steps", "must be non-negative");
        if (cfg.train.noise_dim < 1) fail(root.source, "train.noise_dim", "must be positive");
    }
    if (auto d = root.optional_field("data")) {
        check_known_keys(*d, {"n_total", "n_paired"});
        cfg.data.n_total = d->get_or("n_total", cfg.data.n_total);
        cfg.data.n_paired = d->get_or("n_paired", cfg.data.n_paired);
        if (cfg.data.n_paired < 0 || cfg.data.n_total < cfg.data.n_paired)
            fail(root.source, "data", "need 0 <= n_paired <= n_total");
    }
    if (auto e = root.optional_field("eval")) {
        check_known_keys(*e, {"interval", "sample_count", "checkpoint_interval",
                              "record_wall_time"});
        cfg.eval.eval_interval = e->get_or("interval", cfg.eval.eval_interval);
        cfg.eval.eval_sample_count = e->get_or("sample_count", cfg.eval.eval_sample_count);
        cfg.eval.checkpoint_interval =
            e->get_or("checkpoint_interval", cfg.eval.checkpoint_interval);
        cfg.eval.record_wall_time = e->get_or("record_wall_time", cfg.eval.record_wall_time);
        if (cfg.eval.eval_interval < 0) fail(root.source, "eval.interval", "must be >= 0");
        if (cfg.eval.eval_sample_count < 2)
            fail(root.source, "eval.sample_count", "must be >= 2");
    }
    return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& source_name) {
    json j = parse_json_text(json_text, source_name);
    return parse_experiment(Ctx{j, source_name, ""});
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config(ss.str(), path);
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["seed"] = cfg.train.seed;
    if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
    j["task"] = task_to_json(cfg.task);
    j["model_kind"] = to_string(cfg.train.model_kind);
    j["combination_mode"] = to_string(cfg.train.combination_mode);
    if (cfg.hierarchy) j["hierarchy"] = cfg.hierarchy->sub_parts_per_part;
    if (cfg.autoregressive) j["autoregressive_order"] = cfg.autoregressive->ordered_parts;
    if (cfg.generator_output) j["generator_output"] = to_string(*cfg.generator_output);
    j["train"] = {{"lr", cfg.train.lr},
                  {"batch_size", cfg.train.batch_size},
                  {"disc_updates_per_gen_update", cfg.train.disc_updates_per_gen_update},
                  {"total_gen_steps", cfg.train.total_gen_steps},
                  {"noise_dim", cfg.train.noise_dim},
                  {"gen_hidden", cfg.train.gen_hidden},
                  {"disc_hidden", cfg.train.disc_hidden},
                  {"spectral_power_iterations", cfg.train.spectral_power_iterations}};
    j["data"] = {{"n_total", cfg.data.n_total}, {"n_paired", cfg.data.n_paired}};
    j["eval"] = {{"interval", cfg.eval.eval_interval},
                 {"sample_count", cfg.eval.eval_sample_count},
                 {"checkpoint_interval", cfg.eval.checkpoint_interval},
                 {"record_wall_time", cfg.eval.record_wall_time}};
    return j;
}

SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& source_name) {
    json j = parse_json_text(json_text, source_name);
    Ctx root{j, source_name, ""};
    check_known_keys(root, {"schema_version", "base", "n_paired_values", "model_kinds", "seeds"});
    SweepSpec spec;
    spec.schema_version = root.field("schema_version").get<int>();
    if (spec.schema_version != 1)
        fail(source_name, "schema_version",
             "unsupported version " + std::to_string(spec.schema_version));
    spec.base = parse_experiment(root.field("base"));
    spec.n_paired_values = root.field("n_paired_values").get<std::vector<int>>();
    if (spec.n_paired_values.empty())
        fail(source_name, "n_paired_values", "must be non-empty");
    for (int n : spec.n_paired_values)
        if (n < 0 || n > spec.base.data.n_total)
            fail(source_name, "n_paired_values",
                 "every value must satisfy 0 <= n_paired <= base n_total");
    auto kind_names = root.get_or<std::vector<std::string>>(
        "model_kinds", {"factorgan", "gan_baseline"});
    for (const std::string& name : kind_names) {
        try {
            spec.model_kinds.push_back(model_kind_from_string(name));
        } catch (const std::exception& e) {
            fail(source_name, "model_kinds", e.what());
        }
    }
    spec.seeds = root.field("seeds").get<std::vector<std::uint64_t>>();
    if (spec.seeds.empty()) fail(source_name, "seeds", "must be non-empty");
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open sweep file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_sweep_spec(ss.str(), path);
}

nlohmann::json sweep_spec_to_json(const SweepSpec& spec) {
    json j;
    j["schema_version"] = spec.schema_version;
    j["base"] = experiment_config_to_json(spec.base);
    j["n_paired_values"] = spec.n_paired_values;
    std::vector<std::string> kinds;
    for (ModelKind k : spec.model_kinds) kinds.push_back(to_string(k));
    j["model_kinds"] = kinds;
    j["seeds"] = spec.seeds;
    return j;
}

TrainingRunArgs to_run_args(const ExperimentConfig& cfg) {
    TrainingRunArgs args;
    args.task = cfg.task;
    args.cfg = cfg.train;
    args.split = cfg.data;
    args.opts = cfg.eval;
    args.hierarchy = cfg.hierarchy;
    args.autoregressive = cfg.autoregressive;
    args.generator_output = cfg.generator_output;
    return args;
}

}  // namespace fgan
