#include "ssrforge/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ssrforge/error.hpp"
#include "ssrforge/random.hpp"

namespace ssrforge {

namespace {

const char* const metric_names[] = {"r2", "pcc", "rmse", "mae"};

std::optional<double> metric_value(const MetricsReport& m, const std::string& name) {
    if (name == "r2") return m.r_squared;
    if (name == "pcc") return m.pcc;
    if (name == "rmse") return m.rmse;
    return m.mae;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const auto u = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
}

std::string format_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_real(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Models and configuration

ModelSpec parse_model(const std::string& raw) {
    const auto name = trim(raw);
    if (name == "lr") return {name, ModelKind::linear, 0};
    if (name == "mssra-knn") return {name, ModelKind::mssra_knn, 0};
    if (name == "coreg") return {name, ModelKind::coreg, 0};
    if (name == "smogn-coreg") return {name, ModelKind::smogn_coreg, 0};
    if (name.rfind("knn", 0) == 0 && name.size() > 3 &&
        std::all_of(name.begin() + 3, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        const auto k = std::stoull(name.substr(3));
        if (k == 0) throw ConfigError("model '" + name + "': k must be positive");
        return {name, ModelKind::knn, static_cast<std::size_t>(k)};
    }
    throw ConfigError("unknown model '" + name + "' (expected knn<k>, lr, mssra-knn, coreg, smogn-coreg)");
}

std::vector<ModelSpec> parse_models(const std::string& comma_list) {
    std::vector<ModelSpec> out;
    std::set<std::string> seen;
    for (const auto& item : split(comma_list, ',')) {
        auto m = parse_model(item);
        if (!seen.insert(m.name).second) throw ConfigError("model '" + m.name + "' listed twice");
        out.push_back(std::move(m));
    }
    if (out.empty()) throw ConfigError("no models selected");
    return out;
}

void ExperimentConfig::validate() const {
    split.validate();
    smogn.validate();
    coreg.validate();
    mssra.validate();
    if (models.empty()) throw ConfigError("no models selected");
    if (histogram_bins < 2) throw ConfigError("histogram_bins must be at least 2");
}

namespace {

const char* tails_name(Tails t) { return t == Tails::both ? "both" : t == Tails::low ? "low" : "high"; }

Tails parse_tails(const std::string& v) {
    if (v == "both") return Tails::both;
    if (v == "low") return Tails::low;
    if (v == "high") return Tails::high;
    throw ConfigError("config: smogn.tails must be both, low or high");
}

std::vector<ControlPoint> parse_control_points(const std::string& v) {
    std::vector<ControlPoint> pts;
    for (const auto& item : split(v, ';')) {
        const auto parts = split(item, ':');
        if (parts.size() != 3) throw ConfigError("config: control points are written y:phi:slope;...");
        pts.push_back({to_real("smogn.control_points", parts[0]), to_real("smogn.control_points", parts[1]),
                       to_real("smogn.control_points", parts[2])});
    }
    return pts;
}

std::string models_list(const std::vector<ModelSpec>& models) {
    std::string s;
    for (const auto& m : models) s += (s.empty() ? "" : ",") + m.name;
    return s;
}

}  // namespace

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["data"] = {{"input", input.generic_string()}, {"schema", schema.generic_string()}};
    j["split"] = {{"folds", split.folds}, {"unlabeled_ratio", split.unlabeled_ratio}, {"seed", split.seed}};
    j["models"] = models_list(models);
    nlohmann::ordered_json s;
    s["t_r"] = smogn.t_r;
    s["k"] = smogn.k;
    s["pert"] = smogn.pert;
    s["mode"] = smogn.mode == OverMode::balance ? "balance" : "fixed";
    s["multiplier"] = smogn.multiplier;
    s["under_frac"] = smogn.under_frac;
    s["tails"] = tails_name(smogn.tails);
    if (smogn.control_points) {
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& p : *smogn.control_points) pts.push_back({p.y, p.phi, p.slope});
        s["control_points"] = pts;
    }
    s["max_iterations"] = smogn.max_iterations;
    j["smogn"] = s;
    j["coreg"] = {{"k1", coreg.k1},         {"k2", coreg.k2},
                  {"p1", coreg.p1},         {"p2", coreg.p2},
                  {"max_iterations", coreg.max_iterations}, {"pool_size", coreg.pool_size}};
    nlohmann::ordered_json m;
    m["base_ks"] = mssra.base_ks;
    m["agreement_tol"] = mssra.agreement_tol ? nlohmann::ordered_json(*mssra.agreement_tol) : nlohmann::ordered_json(nullptr);
    m["max_rounds"] = mssra.max_rounds;
    j["mssra"] = m;
    j["output"] = {{"histogram_bins", histogram_bins}};
    return j;
}

ExperimentConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"data", {"input", "schema"}},
        {"split", {"folds", "unlabeled_ratio", "seed"}},
        {"models", {"list"}},
        {"smogn", {"t_r", "k", "pert", "mode", "multiplier", "under_frac", "tails", "control_points", "max_iterations"}},
        {"coreg", {"preset", "k1", "k2", "p1", "p2", "max_iterations", "pool_size"}},
        {"mssra", {"base_ks", "agreement_tol", "max_rounds"}},
        {"output", {"dir", "histogram_bins"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw ConfigError("config: unknown section [" + section + "] or key outside a section");
        for (const auto& [key, _] : body)
            if (!it->second.count(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
        return std::nullopt;
    };

    ExperimentConfig cfg;
    cfg.models = parse_models("knn4,knn7,knn9,lr,mssra-knn,coreg,smogn-coreg");
    if (auto v = get("data.input")) cfg.input = *v;
    if (auto v = get("data.schema")) cfg.schema = *v;
    if (auto v = get("split.folds")) cfg.split.folds = to_unsigned("split.folds", *v);
    if (auto v = get("split.unlabeled_ratio")) cfg.split.unlabeled_ratio = to_real("split.unlabeled_ratio", *v);
    if (auto v = get("split.seed")) cfg.split.seed = to_unsigned("split.seed", *v);
    if (auto v = get("models.list")) cfg.models = parse_models(*v);

    if (auto v = get("smogn.t_r")) cfg.smogn.t_r = to_real("smogn.t_r", *v);
    if (auto v = get("smogn.k")) cfg.smogn.k = to_unsigned("smogn.k", *v);
    if (auto v = get("smogn.pert")) cfg.smogn.pert = to_real("smogn.pert", *v);
    if (auto v = get("smogn.mode")) {
        if (*v == "balance")
            cfg.smogn.mode = OverMode::balance;
        else if (*v == "fixed")
            cfg.smogn.mode = OverMode::fixed;
        else
            throw ConfigError("config: smogn.mode must be balance or fixed");
    }
    if (auto v = get("smogn.multiplier")) cfg.smogn.multiplier = to_real("smogn.multiplier", *v);
    if (auto v = get("smogn.under_frac")) cfg.smogn.under_frac = to_real("smogn.under_frac", *v);
    if (auto v = get("smogn.tails")) cfg.smogn.tails = parse_tails(*v);
    if (auto v = get("smogn.control_points"); v && !v->empty()) cfg.smogn.control_points = parse_control_points(*v);
    if (auto v = get("smogn.max_iterations")) cfg.smogn.max_iterations = to_unsigned("smogn.max_iterations", *v);

    if (auto v = get("coreg.preset")) {
        if (*v == "paper-initial")
            cfg.coreg = CoregParams::initial_budget();
        else if (*v != "default")
            throw ConfigError("config: coreg.preset must be default or paper-initial");
    }
    if (auto v = get("coreg.k1")) cfg.coreg.k1 = to_unsigned("coreg.k1", *v);
    if (auto v = get("coreg.k2")) cfg.coreg.k2 = to_unsigned("coreg.k2", *v);
    if (auto v = get("coreg.p1")) cfg.coreg.p1 = to_real("coreg.p1", *v);
    if (auto v = get("coreg.p2")) cfg.coreg.p2 = to_real("coreg.p2", *v);
    if (auto v = get("coreg.max_iterations")) cfg.coreg.max_iterations = to_unsigned("coreg.max_iterations", *v);
    if (auto v = get("coreg.pool_size")) cfg.coreg.pool_size = to_unsigned("coreg.pool_size", *v);

    if (auto v = get("mssra.base_ks")) {
        cfg.mssra.base_ks.clear();
        for (const auto& k : split(*v, ',')) cfg.mssra.base_ks.push_back(to_unsigned("mssra.base_ks", k));
    }
    if (auto v = get("mssra.agreement_tol"); v && !v->empty())
        cfg.mssra.agreement_tol = to_real("mssra.agreement_tol", *v);
    if (auto v = get("mssra.max_rounds")) cfg.mssra.max_rounds = to_unsigned("mssra.max_rounds", *v);

    if (auto v = get("output.dir")) cfg.output_dir = *v;
    if (auto v = get("output.histogram_bins")) cfg.histogram_bins = to_unsigned("output.histogram_bins", *v);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str());
    // Relative paths are taken from the config file's directory.
    const auto base = path.parent_path();
    auto resolve = [&](std::filesystem::path& p) {
        if (!p.empty() && p.is_relative()) p = base / p;
    };
    resolve(cfg.input);
    resolve(cfg.schema);
    resolve(cfg.output_dir);
    return cfg;
}

std::string default_config_text() {
    return R"([data]
input = data.csv
schema = data.schema.json

[split]
folds = 10
unlabeled_ratio = 0.8
seed = 1

[models]
list = knn4,knn7,knn9,lr,mssra-knn,coreg,smogn-coreg

[smogn]
t_r = 0.25
k = 2
pert = 0.05
mode = balance
multiplier = 2
under_frac = 1
tails = both
control_points =
max_iterations = 1000

[coreg]
preset = default
k1 = 3
k2 = 3
p1 = 2
p2 = 3
max_iterations = 500
pool_size = 100

[mssra]
base_ks = 3,7,9
agreement_tol =
max_rounds = 10

[output]
dir = out
histogram_bins = 20
)";
}

// ---------------------------------------------------------------------------
// Reports

Aggregate aggregate(const std::vector<std::optional<double>>& values) {
    Aggregate a;
    double sum = 0.0;
    for (const auto& v : values)
        if (v) {
            sum += *v;
            ++a.n;
        }
    if (a.n == 0) return a;
    a.mean = sum / static_cast<double>(a.n);
    if (a.n > 1) {
        double ss = 0.0;
        for (const auto& v : values)
            if (v) ss += (*v - a.mean) * (*v - a.mean);
        a.sd = std::sqrt(ss / static_cast<double>(a.n - 1));
    }
    return a;
}

const ModelResult& RunReport::model(const std::string& name) const {
    for (const auto& m : models)
        if (m.name == name) return m;
    throw ConfigError("report has no model '" + name + "'");
}

nlohmann::ordered_json RunReport::to_json() const {
    using json = nlohmann::ordered_json;
    json j;
    j["tool"] = "ssr-forge";
    j["version"] = version;
    j["dataset"] = dataset;
    j["instances"] = instances;
    j["config"] = config.to_json();
    j["folds"] = json::array();
    for (const auto& f : folds) {
        json fj;
        fj["fold"] = f.fold;
        fj["train"] = f.train;
        fj["test"] = f.test;
        fj["labeled"] = f.labeled;
        fj["unlabeled"] = f.unlabeled;
        fj["seeds"] = {{"split", f.split_seed}, {"smogn", f.smogn_seed}, {"coreg", f.coreg_seed}};
        if (f.smogn) {
            const auto& s = *f.smogn;
            fj["smogn"] = {{"input", s.input},       {"output", s.output},         {"original", s.original},
                           {"smoter", s.smoter},     {"gauss", s.gauss},           {"rare_bins", s.rare_bins},
                           {"normal_bins", s.normal_bins}, {"warnings", s.warnings}};
        }
        for (const auto& [name, it] : f.coreg_iterations) {
            const auto& sizes = f.coreg_sizes.at(name);
            fj["coreg"][name] = {{"iterations", it}, {"l1", sizes.first}, {"l2", sizes.second}};
        }
        j["folds"].push_back(fj);
    }
    j["models"] = json::array();
    for (const auto& m : models) {
        json mj;
        mj["name"] = m.name;
        mj["folds"] = json::array();
        for (const auto& r : m.folds) mj["folds"].push_back(ssrforge::to_json(r));
        for (const auto& [metric, a] : m.summary) mj["aggregate"][metric] = {{"mean", a.mean}, {"sd", a.sd}, {"n", a.n}};
        j["models"].push_back(mj);
    }
    j["leakage"] = {{"checks", leakage_checks}, {"violations", leakage_violations}};
    return j;
}

std::vector<HistogramRow> emit_histogram(const Dataset& before, const Dataset& after, std::size_t bins) {
    if (bins < 2) throw ConfigError("histogram: at least two bins are required");
    const auto tb = before.targets();
    const auto ta = after.targets();
    if (tb.empty() || ta.empty()) throw DataError("histogram: empty dataset");
    double lo = std::min(*std::min_element(tb.begin(), tb.end()), *std::min_element(ta.begin(), ta.end()));
    double hi = std::max(*std::max_element(tb.begin(), tb.end()), *std::max_element(ta.begin(), ta.end()));
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramRow> rows(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        rows[b].low = lo + width * static_cast<double>(b);
        rows[b].high = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    auto slot = [&](double y) {
        if (width <= 0.0) return std::size_t{0};
        const auto b = static_cast<std::size_t>(std::floor((y - lo) / width));
        return std::min(b, bins - 1);
    };
    for (double y : tb) ++rows[slot(y)].before;
    for (double y : ta) ++rows[slot(y)].after;
    return rows;
}

void write_histogram_csv(const std::vector<HistogramRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "bin_low,bin_high,count_before,count_after\n";
    for (const auto& r : rows) out << format_real(r.low) << ',' << format_real(r.high) << ',' << r.before << ',' << r.after << '\n';
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

std::unique_ptr<Regressor> train_model(const ModelSpec& spec, const Dataset& L, const Dataset& U,
                                       const Dataset* smogn_L, const ExperimentConfig& cfg,
                                       std::uint64_t coreg_seed, FoldInfo& info, std::vector<HistoryRow>& history) {
    switch (spec.kind) {
        case ModelKind::knn:
            return std::make_unique<KnnRegressor>(knn_baseline(L, spec.k));
        case ModelKind::linear:
            return std::make_unique<LinearModel>(fit_linear(L));
        case ModelKind::mssra_knn:
            return std::make_unique<KnnEnsemble>(self_train_mssra(L, U, cfg.mssra).ensemble);
        case ModelKind::coreg:
        case ModelKind::smogn_coreg: {
            auto params = cfg.coreg;
            params.seed = coreg_seed;
            auto model = coreg_train(spec.uses_smogn() ? *smogn_L : L, U, params);
            info.coreg_iterations[spec.name] = model.iterations();
            info.coreg_sizes[spec.name] = {model.learner1().reference().size(), model.learner2().reference().size()};
            for (const auto& step : model.history()) history.push_back({info.fold, spec.name, step});
            return std::make_unique<CoregRegressor>(std::move(model));
        }
    }
    throw ConfigError("unhandled model kind");
}

}  // namespace

RunReport run_experiment(const Dataset& data, const ExperimentConfig& cfg) {
    cfg.validate();
    RunReport report;
    report.config = cfg;
    report.dataset = data.provenance().substr(0, data.provenance().find(';'));
    report.instances = data.size();

    const Dataset labeled = data.labeled();
    const Dataset extra_unlabeled = data.unlabeled();
    const auto root = cfg.split.seed;
    const auto folds = kfold(labeled, cfg.split.folds, derive_seed(root, "kfold"));
    const bool need_smogn =
        std::any_of(cfg.models.begin(), cfg.models.end(), [](const ModelSpec& m) { return m.uses_smogn(); });

    for (const auto& m : cfg.models) report.models.push_back(ModelResult{m.name, {}, {}});
    std::vector<Instance> hist_before;
    std::vector<Instance> hist_after;

    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& fold = folds[f];
        FoldInfo info;
        info.fold = f;
        info.train = fold.train.size();
        info.test = fold.test.size();
        info.split_seed = derive_seed(root, "split", f);
        info.smogn_seed = derive_seed(root, "smogn", f);
        info.coreg_seed = derive_seed(root, "coreg", f);
        const auto context = [&](const std::string& model) {
            return "fold " + std::to_string(f) + (model.empty() ? "" : ", model " + model) + ": ";
        };

        auto [L, U0] = split_labeled(fold.train, cfg.split.unlabeled_ratio, info.split_seed);
        std::vector<Instance> u_rows(U0.instances());
        u_rows.insert(u_rows.end(), extra_unlabeled.instances().begin(), extra_unlabeled.instances().end());
        const Dataset U = U0.with_instances(std::move(u_rows), U0.provenance());
        info.labeled = L.size();
        info.unlabeled = U.size();

        std::optional<SmognResult> sampled;
        if (need_smogn) {
            auto params = cfg.smogn;
            params.seed = info.smogn_seed;
            try {
                sampled = smogn(L, params, DistanceConfig::fit(L, 2.0));
            } catch (const DataError& e) {
                throw DataError(context("smogn-coreg") + e.what());
            } catch (const ConfigError& e) {
                throw ConfigError(context("smogn-coreg") + e.what());
            }
            SmognTrace t;
            t.input = L.size();
            t.output = sampled->data.size();
            t.original = sampled->count(SynthMethod::original);
            t.smoter = sampled->count(SynthMethod::smoter);
            t.gauss = sampled->count(SynthMethod::gauss);
            t.rare_bins = sampled->partition.rare_bins();
            t.normal_bins = sampled->partition.normal_bins();
            t.warnings = sampled->warnings;
            info.smogn = t;
            hist_before.insert(hist_before.end(), L.instances().begin(), L.instances().end());
            hist_after.insert(hist_after.end(), sampled->data.instances().begin(), sampled->data.instances().end());
        }

        // Identity audit: nothing from the test fold may reach a training input.
        std::unordered_set<InstanceId> train_ids;
        for (const auto& i : L.instances()) train_ids.insert(i.uid);
        for (const auto& i : U.instances()) train_ids.insert(i.uid);
        if (sampled)
            for (const auto& r : sampled->records) train_ids.insert(r.instance.uid);
        for (const auto& t : fold.test.instances()) {
            ++report.leakage_checks;
            if (train_ids.count(t.uid)) ++report.leakage_violations;
        }

        std::vector<double> truth;
        truth.reserve(fold.test.size());
        for (const auto& t : fold.test.instances()) truth.push_back(*t.y);

        for (std::size_t m = 0; m < cfg.models.size(); ++m) {
            const auto& spec = cfg.models[m];
            std::unique_ptr<Regressor> model;
            std::vector<double> pred;
            try {
                model = train_model(spec, L, U, sampled ? &sampled->data : nullptr, cfg, info.coreg_seed, info,
                                    report.history);
                pred.reserve(fold.test.size());
                for (const auto& t : fold.test.instances()) pred.push_back(model->predict(t));
                report.models[m].folds.push_back(evaluate(truth, pred));
            } catch (const DataError& e) {
                throw DataError(context(spec.name) + e.what());
            } catch (const ConfigError& e) {
                throw ConfigError(context(spec.name) + e.what());
            }
        }
        report.folds.push_back(std::move(info));
    }

    for (auto& m : report.models) {
        for (const char* metric : metric_names) {
            std::vector<std::optional<double>> values;
            for (const auto& r : m.folds) values.push_back(metric_value(r, metric));
            m.summary[metric] = aggregate(values);
        }
    }
    if (!hist_before.empty())
        report.histogram = emit_histogram(labeled.with_instances(std::move(hist_before), "before"),
                                          labeled.with_instances(std::move(hist_after), "after"), cfg.histogram_bins);
    return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.input.empty() || cfg.schema.empty()) throw ConfigError("config: data.input and data.schema are required");
    const auto data = load_csv(cfg.input, Schema::read_json(cfg.schema));
    auto report = run_experiment(data, cfg);
    if (!cfg.output_dir.empty()) write_outputs(report, cfg.output_dir);
    return report;
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir) {
    const auto started = std::chrono::system_clock::now();
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        if (!out) throw DataError("cannot write " + (dir / "report.json").string());
        out << report.to_json().dump(2) << '\n';
    }
    for (const char* metric : metric_names) {
        std::ofstream out(dir / (std::string("table_") + metric + ".csv"));
        out << "model";
        for (std::size_t f = 0; f < report.folds.size(); ++f) out << ",fold_" << f;
        out << ",mean,sd\n";
        for (const auto& m : report.models) {
            out << m.name;
            for (const auto& r : m.folds) {
                const auto v = metric_value(r, metric);
                out << ',' << (v ? format_real(*v) : "");
            }
            const auto& a = m.summary.at(metric);
            out << ',' << format_real(a.mean) << ',' << format_real(a.sd) << '\n';
        }
    }
    if (!report.histogram.empty()) write_histogram_csv(report.histogram, dir / "histogram.csv");
    {
        std::ofstream out(dir / "history.csv");
        out << "fold,model,iteration,learner,uid,delta,pseudo_label\n";
        for (const auto& h : report.history)
            out << h.fold << ',' << h.model << ',' << h.step.iteration << ',' << h.step.learner << ',' << h.step.uid
                << ',' << format_real(h.step.delta) << ',' << format_real(h.step.pseudo_label) << '\n';
    }
    {
        // Wall-clock data lives apart from report.json so reports stay byte-stable.
        const auto t = std::chrono::duration_cast<std::chrono::seconds>(started.time_since_epoch()).count();
        nlohmann::ordered_json meta{{"tool", "ssr-forge"}, {"version", version}, {"written_unix", t}};
        std::ofstream out(dir / "run_meta.json");
        out << meta.dump(2) << '\n';
    }
}

SweepResult sweep_ur(const Dataset& data, const ExperimentConfig& cfg, const std::vector<double>& urs) {
    SweepResult sweep;
    for (double ur : urs) {
        if (!(ur >= 0.0 && ur < 1.0)) throw ConfigError("sweep: every UR must lie in [0, 1)");
        auto c = cfg;
        c.split.unlabeled_ratio = ur;
        sweep.urs.push_back(ur);
        sweep.reports.push_back(run_experiment(data, c));
    }
    return sweep;
}

SweepResult sweep_ur(const ExperimentConfig& cfg, const std::vector<double>& urs) {
    if (cfg.input.empty() || cfg.schema.empty()) throw ConfigError("config: data.input and data.schema are required");
    const auto data = load_csv(cfg.input, Schema::read_json(cfg.schema));
    auto sweep = sweep_ur(data, cfg, urs);
    if (!cfg.output_dir.empty()) {
        for (std::size_t i = 0; i < sweep.urs.size(); ++i)
            write_outputs(sweep.reports[i], cfg.output_dir / ("ur_" + fmt_real(sweep.urs[i])));
        write_sweep_csv(sweep, cfg.output_dir / "ur_sweep.csv");
    }
    return sweep;
}

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "ur,model,metric,mean,sd\n";
    for (std::size_t i = 0; i < sweep.urs.size(); ++i)
        for (const auto& m : sweep.reports[i].models)
            for (const char* metric : metric_names) {
                const auto& a = m.summary.at(metric);
                out << fmt_real(sweep.urs[i]) << ',' << m.name << ',' << metric << ',' << format_real(a.mean) << ','
                    << format_real(a.sd) << '\n';
            }
}

}  // namespace ssrforge
