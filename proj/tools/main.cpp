#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssrforge/coreg.hpp"
#include "ssrforge/data.hpp"
#include "ssrforge/error.hpp"
#include "ssrforge/relevance.hpp"
#include "ssrforge/runner.hpp"
#include "ssrforge/smogn.hpp"
#include "ssrforge/synth.hpp"

namespace fs = std::filesystem;
using namespace ssrforge;

namespace {

constexpr int exit_config = 2;
constexpr int exit_data = 3;

std::string real_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

Tails tails_from(const std::string& v) {
    if (v == "both") return Tails::both;
    if (v == "low") return Tails::low;
    if (v == "high") return Tails::high;
    throw ConfigError("tails must be both, low or high");
}

std::vector<double> parse_urs(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--urs: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("--urs: no values given");
    return out;
}

// Experiment flags layered over the optional config file.
struct ExperimentFlags {
    std::string config;
    std::string input;
    std::string schema;
    std::string models;
    std::optional<std::size_t> folds;
    std::optional<double> ur;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::string tails;
    std::string coreg_preset;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "experiment INI file");
        cmd->add_option("--input", input, "data CSV");
        cmd->add_option("--schema", schema, "schema JSON");
        cmd->add_option("--models", models, "comma list: knn<k>,lr,mssra-knn,coreg,smogn-coreg");
        cmd->add_option("--folds", folds, "cross-validation folds");
        cmd->add_option("--ur", ur, "unlabeled ratio");
        cmd->add_option("--seed", seed, "root seed");
        cmd->add_option("--output-dir", output_dir, "output directory");
        cmd->add_option("--tails", tails, "relevance tails for SMOGN: both|low|high");
        cmd->add_option("--coreg-preset", coreg_preset, "default|paper-initial");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config.empty() ? parse_config("") : load_config(config);
        if (!input.empty()) cfg.input = input;
        if (!schema.empty()) cfg.schema = schema;
        if (!models.empty()) cfg.models = parse_models(models);
        if (folds) cfg.split.folds = *folds;
        if (ur) cfg.split.unlabeled_ratio = *ur;
        if (seed) cfg.split.seed = *seed;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (!tails.empty()) cfg.smogn.tails = tails_from(tails);
        if (coreg_preset == "paper-initial") {
            cfg.coreg = CoregParams::initial_budget();
        } else if (!coreg_preset.empty() && coreg_preset != "default") {
            throw ConfigError("--coreg-preset must be default or paper-initial");
        }
        if (cfg.output_dir.empty()) cfg.output_dir = "out";
        cfg.validate();
        return cfg;
    }
};

void print_summary(const RunReport& report) {
    std::cout << "model,rmse_mean,rmse_sd,r2_mean\n";
    for (const auto& m : report.models)
        std::cout << m.name << ',' << m.summary.at("rmse").mean << ',' << m.summary.at("rmse").sd << ','
                  << m.summary.at("r2").mean << '\n';
    if (report.leakage_violations) std::cout << "leakage violations: " << report.leakage_violations << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imbalanced semi-supervised regression: SMOGN resampling and COREG co-training"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    // synth
    std::string synth_spec, synth_out, synth_schema;
    std::optional<std::uint64_t> synth_seed;
    auto* synth = app.add_subcommand("synth", "generate a synthetic imbalanced table");
    synth->add_option("--spec", synth_spec, "INI file with a [synth] section (defaults to the benchmark)");
    synth->add_option("--output", synth_out, "CSV to write")->required();
    synth->add_option("--schema-out", synth_schema, "schema JSON to write")->required();
    synth->add_option("--seed", synth_seed, "override the spec seed");

    // sample
    std::string s_input, s_schema, s_output, s_trace, s_mode = "balance", s_tails = "both";
    SmognParams sp;
    auto* sample = app.add_subcommand("sample", "rebalance a labeled table with SMOGN");
    sample->add_option("--input", s_input)->required();
    sample->add_option("--schema", s_schema)->required();
    sample->add_option("--t-r", sp.t_r, "relevance threshold")->capture_default_str();
    sample->add_option("--k", sp.k, "neighbors")->capture_default_str();
    sample->add_option("--pert", sp.pert, "Gaussian perturbation")->capture_default_str();
    sample->add_option("--mode", s_mode, "balance|fixed")->capture_default_str();
    sample->add_option("--multiplier", sp.multiplier, "fixed-mode rare growth")->capture_default_str();
    sample->add_option("--under-frac", sp.under_frac, "fixed-mode normal keep fraction")->capture_default_str();
    sample->add_option("--tails", s_tails, "both|low|high")->capture_default_str();
    sample->add_option("--seed", sp.seed)->capture_default_str();
    sample->add_option("--output", s_output)->required();
    sample->add_option("--trace", s_trace, "CSV of synthesis records");

    // relevance
    std::string r_input, r_schema, r_output, r_tails = "both";
    std::size_t r_points = 512;
    auto* rel = app.add_subcommand("relevance", "tabulate the relevance function on a grid");
    rel->add_option("--input", r_input)->required();
    rel->add_option("--schema", r_schema)->required();
    rel->add_option("--tails", r_tails, "both|low|high")->capture_default_str();
    rel->add_option("--points", r_points, "grid size")->capture_default_str();
    rel->add_option("--output", r_output, "CSV to write (stdout when omitted)");

    // train
    std::string t_input, t_schema, t_summary, t_history;
    double t_ur = 0.8;
    bool t_smogn = false;
    std::string t_tails = "both";
    CoregParams cp;
    std::string t_preset;
    auto* train = app.add_subcommand("train", "co-train two k-NN regressors on one L/U split");
    train->add_option("--input", t_input)->required();
    train->add_option("--schema", t_schema)->required();
    train->add_option("--ur", t_ur, "share of labeled rows to mask before training")->capture_default_str();
    train->add_option("--seed", cp.seed)->capture_default_str();
    train->add_option("--k1", cp.k1)->capture_default_str();
    train->add_option("--k2", cp.k2)->capture_default_str();
    train->add_option("--p1", cp.p1)->capture_default_str();
    train->add_option("--p2", cp.p2)->capture_default_str();
    train->add_option("--max-iterations", cp.max_iterations)->capture_default_str();
    train->add_option("--pool-size", cp.pool_size)->capture_default_str();
    train->add_option("--preset", t_preset, "default|paper-initial; applied before the other flags");
    train->add_flag("--smogn", t_smogn, "rebalance L with SMOGN first");
    train->add_option("--tails", t_tails, "SMOGN relevance tails")->capture_default_str();
    train->add_option("--summary", t_summary, "JSON summary (stdout when omitted)");
    train->add_option("--history", t_history, "per-iteration CSV");

    // evaluate, sweep-ur
    ExperimentFlags ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "cross-validated model comparison");
    ev.attach(evaluate_cmd);
    ExperimentFlags sw;
    std::string urs = "0.5,0.8,0.99";
    auto* sweep = app.add_subcommand("sweep-ur", "repeat the evaluation over unlabeled ratios");
    sw.attach(sweep);
    sweep->add_option("--urs", urs, "comma list of unlabeled ratios")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*synth) {
            auto spec = synth_spec.empty() ? skewed_benchmark(42) : load_synth_spec(synth_spec);
            if (synth_seed) spec.seed = *synth_seed;
            const auto d = generate(spec);
            auto out = open_out(synth_out);
            write_csv(d, out);
            d.schema().write_json(synth_schema);
            const auto mask = minority_mask(d);
            std::cerr << "wrote " << d.size() << " rows (" << std::count(mask.begin(), mask.end(), true)
                      << " minority)\n";
        } else if (*sample) {
            if (s_mode == "balance") sp.mode = OverMode::balance;
            else if (s_mode == "fixed") sp.mode = OverMode::fixed;
            else throw ConfigError("--mode must be balance or fixed");
            sp.tails = tails_from(s_tails);
            const auto d = load_csv(s_input, Schema::read_json(s_schema)).labeled();
            const auto res = smogn(d, sp, DistanceConfig::fit(d, 2.0));
            for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
            auto out = open_out(s_output);
            write_csv(res.data, out);
            if (!s_trace.empty()) {
                auto tr = open_out(s_trace);
                tr << "row,method,seed_index,neighbor_index,target\n";
                for (std::size_t i = 0; i < res.records.size(); ++i) {
                    const auto& r = res.records[i];
                    tr << i << ',' << to_string(r.method) << ',' << r.seed_index << ','
                       << (r.neighbor_index ? std::to_string(*r.neighbor_index) : "") << ','
                       << real_text(*r.instance.y) << '\n';
                }
            }
            std::cerr << d.size() << " -> " << res.data.size() << " rows; smoter "
                      << res.count(SynthMethod::smoter) << ", gauss " << res.count(SynthMethod::gauss) << '\n';
        } else if (*rel) {
            if (r_points < 2) throw ConfigError("--points must be at least 2");
            const auto d = load_csv(r_input, Schema::read_json(r_schema));
            const auto ys = d.targets();
            if (ys.empty()) throw DataError("no labeled rows");
            const RelevanceFn fn = RelevanceFn::from_targets(ys, tails_from(r_tails));
            const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
            std::ofstream file;
            if (!r_output.empty()) file = open_out(r_output);
            std::ostream& out = r_output.empty() ? std::cout : file;
            out << "y,phi\n";
            for (std::size_t i = 0; i < r_points; ++i) {
                const double y = *lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(r_points - 1);
                out << real_text(y) << ',' << real_text(fn(y)) << '\n';
            }
        } else if (*train) {
            if (!t_preset.empty()) {
                CoregParams base = t_preset == "paper-initial" ? CoregParams::initial_budget() : CoregParams{};
                if (t_preset != "default" && t_preset != "paper-initial")
                    throw ConfigError("--preset must be default or paper-initial");
                if (train->count("--max-iterations") == 0) cp.max_iterations = base.max_iterations;
            }
            const auto d = load_csv(t_input, Schema::read_json(t_schema));
            auto [L, U0] = split_labeled(d.labeled(), t_ur, derive_seed(cp.seed, "split"));
            std::vector<Instance> u_rows(U0.instances());
            const auto extra = d.unlabeled();
            u_rows.insert(u_rows.end(), extra.instances().begin(), extra.instances().end());
            const auto U = U0.with_instances(std::move(u_rows), U0.provenance());
            Dataset train_l = L;
            if (t_smogn) {
                SmognParams p;
                p.seed = derive_seed(cp.seed, "smogn");
                p.tails = tails_from(t_tails);
                train_l = smogn(L, p, DistanceConfig::fit(L, 2.0)).data;
            }
            const auto model = coreg_train(train_l, U, cp);
            nlohmann::ordered_json j{{"labeled", train_l.size()},
                                     {"unlabeled", U.size()},
                                     {"iterations", model.iterations()},
                                     {"l1", model.learner1().reference().size()},
                                     {"l2", model.learner2().reference().size()},
                                     {"pseudo_labels", model.history().size()}};
            if (t_summary.empty()) {
                std::cout << j.dump(2) << '\n';
            } else {
                open_out(t_summary) << j.dump(2) << '\n';
            }
            if (!t_history.empty()) {
                auto out = open_out(t_history);
                out << "iteration,learner,uid,delta,pseudo_label\n";
                for (const auto& s : model.history())
                    out << s.iteration << ',' << s.learner << ',' << s.uid << ',' << real_text(s.delta) << ','
                        << real_text(s.pseudo_label) << '\n';
            }
        } else if (*evaluate_cmd) {
            const auto report = run_experiment(ev.resolve());
            print_summary(report);
        } else if (*sweep) {
            const auto values = parse_urs(urs);
            const auto result = sweep_ur(sw.resolve(), values);
            for (std::size_t i = 0; i < result.urs.size(); ++i) {
                std::cout << "ur=" << result.urs[i] << '\n';
                print_summary(result.reports[i]);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
