#include "ssrforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <numbers>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ssrforge/error.hpp"
#include "ssrforge/random.hpp"

namespace ssrforge {

namespace {

constexpr std::string_view minority_tag = "minority=";

double signal_shape(double x0, double x1) {
    return 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * x0) + 0.25 * (2.0 * x1 - 1.0);
}

}  // namespace

void SynthSpec::validate() const {
    if (n < 2) throw ConfigError("synth: n must be at least 2");
    if (numeric_features < 3) throw ConfigError("synth: at least 3 numeric features are required");
    for (auto c : nominal_cardinalities)
        if (c < 2) throw ConfigError("synth: nominal cardinalities must be at least 2");
    if (!(rare_fraction >= 0.0 && rare_fraction < 0.5)) throw ConfigError("synth: rare_fraction must lie in [0, 0.5)");
    if (!(majority_sd >= 0.0 && minority_sd >= 0.0 && noise_sd >= 0.0))
        throw ConfigError("synth: standard deviations must be non-negative");
    if (!(separation >= 0.0 && separation <= 1.0)) throw ConfigError("synth: separation must lie in [0, 1]");
}

SynthSpec skewed_benchmark(std::uint64_t seed) {
    SynthSpec s;
    s.seed = seed;
    return s;
}

namespace {

double spec_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(d))
        throw ConfigError("synth: '" + key + "' expects a number, got '" + v + "'");
    return d;
}

std::uint64_t spec_unsigned(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    std::uint64_t u = 0;
    try {
        if (!v.empty() && v[0] != '-') u = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw ConfigError("synth: '" + key + "' expects a non-negative integer, got '" + v + "'");
    return u;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("synth: ") + e.what());
    }
    static const std::set<std::string> keys = {"n", "numeric_features", "nominal_cardinalities", "target_model",
                                               "majority_mean", "majority_sd", "minority_mean", "minority_sd",
                                               "rare_fraction", "signal", "noise_sd", "separation", "seed"};
    SynthSpec s;
    for (const auto& [section, body] : tree) {
        if (section != "synth") throw ConfigError("synth: unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            if (!keys.count(key)) throw ConfigError("synth: unknown key '" + key + "'");
            auto v = node.get_value<std::string>();
            v.erase(0, v.find_first_not_of(" \t"));
            v.erase(v.find_last_not_of(" \t") + 1);
            if (key == "n") s.n = spec_unsigned(key, v);
            else if (key == "numeric_features") s.numeric_features = spec_unsigned(key, v);
            else if (key == "seed") s.seed = spec_unsigned(key, v);
            else if (key == "majority_mean") s.majority_mean = spec_real(key, v);
            else if (key == "majority_sd") s.majority_sd = spec_real(key, v);
            else if (key == "minority_mean") s.minority_mean = spec_real(key, v);
            else if (key == "minority_sd") s.minority_sd = spec_real(key, v);
            else if (key == "rare_fraction") s.rare_fraction = spec_real(key, v);
            else if (key == "signal") s.signal = spec_real(key, v);
            else if (key == "noise_sd") s.noise_sd = spec_real(key, v);
            else if (key == "separation") s.separation = spec_real(key, v);
            else if (key == "target_model") {
                if (v == "mixture") s.target_model = TargetModel::mixture;
                else if (v == "function") s.target_model = TargetModel::function;
                else throw ConfigError("synth: target_model must be mixture or function");
            } else {
                s.nominal_cardinalities.clear();
                std::stringstream ss(v);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (item.find_first_not_of(" \t") != std::string::npos)
                        s.nominal_cardinalities.push_back(spec_unsigned(key, item.substr(item.find_first_not_of(" \t"))));
            }
        }
    }
    s.validate();
    return s;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open synth spec " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_synth_spec(ss.str());
}

Dataset generate(const SynthSpec& spec) {
    spec.validate();
    std::vector<Column> columns;
    for (std::size_t j = 0; j < spec.numeric_features; ++j) columns.push_back({"x" + std::to_string(j), FeatureKind::numeric});
    for (std::size_t j = 0; j < spec.nominal_cardinalities.size(); ++j)
        columns.push_back({"c" + std::to_string(j), FeatureKind::nominal});
    columns.push_back({"target", FeatureKind::numeric});
    Schema schema(std::move(columns), "target");
    for (std::size_t j = 0; j < spec.nominal_cardinalities.size(); ++j)
        for (std::size_t c = 0; c < spec.nominal_cardinalities[j]; ++c)
            schema.intern(spec.numeric_features + j, "k" + std::to_string(c));

    Rng rng(spec.seed);
    const bool mixture = spec.target_model == TargetModel::mixture;
    const double segment_cut = 0.2;
    std::vector<Instance> rows;
    rows.reserve(spec.n);
    std::string modes;
    modes.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool minority = mixture && rng.uniform01() < spec.rare_fraction;
        Instance inst;
        inst.uid = i;
        inst.x.resize(spec.numeric_features + spec.nominal_cardinalities.size());
        for (std::size_t j = 0; j < spec.numeric_features; ++j) inst.x[j] = rng.uniform01();
        // Segment feature: the band below segment_cut holds only minority rows.
        if (minority && rng.uniform01() < spec.separation)
            inst.x[2] = segment_cut * inst.x[2];
        else if (mixture)
            inst.x[2] = segment_cut + (1.0 - segment_cut) * inst.x[2];
        // c0 marks the segment (category 0 mostly minority), c1 buckets x1,
        // later nominal columns are uniform noise.
        for (std::size_t j = 0; j < spec.nominal_cardinalities.size(); ++j) {
            const auto card = spec.nominal_cardinalities[j];
            std::size_t code;
            if (j == 0 && mixture) {
                const bool segment = minority ? rng.uniform01() < spec.separation : rng.uniform01() < 0.02;
                code = segment ? 0 : 1 + rng.index(card - 1);
            } else if (j == 1) {
                code = std::min(card - 1, static_cast<std::size_t>(inst.x[1] * static_cast<double>(card)));
            } else {
                code = rng.index(card);
            }
            inst.x[spec.numeric_features + j] = static_cast<double>(code);
        }
        const double shape = signal_shape(inst.x[0], inst.x[1]);
        double y;
        if (mixture) {
            const double mean = minority ? spec.minority_mean : spec.majority_mean;
            const double sd = minority ? spec.minority_sd : spec.majority_sd;
            y = mean + spec.signal * (shape - 0.5) + sd * rng.normal();
        } else {
            y = shape + spec.noise_sd * rng.normal();
        }
        inst.y = std::clamp(y, 0.0, 1.0);
        modes.push_back(minority ? '1' : '0');
        rows.push_back(std::move(inst));
    }
    std::string provenance = "synth:";
    provenance += mixture ? "mixture" : "function";
    provenance += ";seed=" + std::to_string(spec.seed) + ";" + std::string(minority_tag) + modes;
    return Dataset(std::make_shared<const Schema>(std::move(schema)), std::move(rows), std::move(provenance));
}

std::vector<bool> minority_mask(const Dataset& d) {
    const auto& p = d.provenance();
    const auto at = p.find(minority_tag);
    if (at == std::string::npos) throw DataError("dataset carries no synthetic mode tags");
    std::vector<bool> mask;
    for (std::size_t i = at + minority_tag.size(); i < p.size() && (p[i] == '0' || p[i] == '1'); ++i)
        mask.push_back(p[i] == '1');
    if (mask.size() != d.size()) throw DataError("mode tags do not match the dataset size");
    return mask;
}

}  // namespace ssrforge
