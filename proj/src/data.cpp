#include "ssrforge/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ssrforge/error.hpp"
#include "ssrforge/random.hpp"

namespace ssrforge {

namespace {

std::string kind_name(FeatureKind k) { return k == FeatureKind::numeric ? "numeric" : "nominal"; }

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool is_missing_token(const std::string& cell) {
    const auto t = trim(cell);
    return t.empty() || t == "?";
}

std::optional<double> parse_real(const std::string& cell) {
    const auto t = trim(cell);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<Column> columns, std::string target, std::optional<std::string> id)
    : columns_(std::move(columns)), target_(std::move(target)), id_(std::move(id)) {
    std::unordered_set<std::string> seen;
    bool target_found = false;
    bool id_found = !id_.has_value();
    for (const auto& c : columns_) {
        if (c.name.empty()) throw ConfigError("schema: empty column name");
        if (!seen.insert(c.name).second)
            throw ConfigError("schema: duplicate column name '" + c.name + "'");
        if (c.name == target_) {
            target_found = true;
            if (c.kind != FeatureKind::numeric)
                throw ConfigError("schema: target column '" + target_ + "' must be numeric");
            continue;
        }
        if (id_ && c.name == *id_) {
            id_found = true;
            continue;
        }
        features_.push_back(Feature{c.name, c.kind, {}});
    }
    if (!target_found) throw ConfigError("schema: target column not found: '" + target_ + "'");
    if (!id_found) throw ConfigError("schema: id column not found: '" + *id_ + "'");
    if (id_ && *id_ == target_) throw ConfigError("schema: id column cannot be the target");
    if (features_.empty()) throw ConfigError("schema: at least one feature column is required");
}

std::size_t Schema::intern(std::size_t feature, const std::string& token) {
    auto& cats = features_.at(feature).categories;
    const auto it = std::find(cats.begin(), cats.end(), token);
    if (it != cats.end()) return static_cast<std::size_t>(it - cats.begin());
    cats.push_back(token);
    return cats.size() - 1;
}

std::optional<std::size_t> Schema::find_category(std::size_t feature,
                                                 const std::string& token) const {
    const auto& cats = features_.at(feature).categories;
    const auto it = std::find(cats.begin(), cats.end(), token);
    if (it == cats.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cats.begin());
}

Schema Schema::parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("schema: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("columns") || !j.contains("target"))
        throw ConfigError("schema: expected object with 'columns' and 'target'");
    for (const auto& [key, _] : j.items())
        if (key != "columns" && key != "target" && key != "id" && key != "categories")
            throw ConfigError("schema: unknown key '" + key + "'");
    std::vector<Column> columns;
    for (const auto& c : j.at("columns")) {
        if (!c.contains("name") || !c.contains("kind"))
            throw ConfigError("schema: column entries need 'name' and 'kind'");
        const auto kind = c.at("kind").get<std::string>();
        FeatureKind k;
        if (kind == "numeric")
            k = FeatureKind::numeric;
        else if (kind == "nominal")
            k = FeatureKind::nominal;
        else
            throw ConfigError("schema: unknown column kind '" + kind + "'");
        columns.push_back(Column{c.at("name").get<std::string>(), k});
    }
    std::optional<std::string> id;
    if (j.contains("id") && !j.at("id").is_null()) id = j.at("id").get<std::string>();
    Schema s(std::move(columns), j.at("target").get<std::string>(), std::move(id));
    // Optional fixed category order per nominal feature.
    if (j.contains("categories")) {
        for (const auto& [name, tokens] : j.at("categories").items()) {
            const auto it = std::find_if(s.features_.begin(), s.features_.end(),
                                         [&](const Feature& f) { return f.name == name; });
            if (it == s.features_.end() || it->numeric())
                throw ConfigError("schema: categories given for non-nominal column '" + name + "'");
            for (const auto& t : tokens) s.intern(static_cast<std::size_t>(it - s.features_.begin()),
                                                  t.get<std::string>());
        }
    }
    return s;
}

Schema Schema::read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("schema: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

std::string Schema::to_json() const {
    nlohmann::ordered_json j;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : columns_)
        j["columns"].push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
    j["target"] = target_;
    j["id"] = id_ ? nlohmann::ordered_json(*id_) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json cats = nlohmann::ordered_json::object();
    for (const auto& f : features_)
        if (!f.numeric() && !f.categories.empty()) cats[f.name] = f.categories;
    if (!cats.empty()) j["categories"] = cats;
    return j.dump(2);
}

void Schema::write_json(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << to_json() << '\n';
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::shared_ptr<const Schema> schema, std::vector<Instance> instances,
                 std::string provenance)
    : schema_(std::move(schema)), instances_(std::move(instances)), provenance_(std::move(provenance)) {
    const auto arity = schema_->arity();
    for (const auto& inst : instances_)
        if (inst.x.size() != arity)
            throw DataError("instance arity " + std::to_string(inst.x.size()) +
                            " does not match schema arity " + std::to_string(arity));
}

std::size_t Dataset::labeled_count() const {
    return static_cast<std::size_t>(
        std::count_if(instances_.begin(), instances_.end(), [](const Instance& i) { return i.labeled(); }));
}

std::vector<double> Dataset::targets() const {
    std::vector<double> out;
    out.reserve(instances_.size());
    for (const auto& i : instances_)
        if (i.y) out.push_back(*i.y);
    return out;
}

Dataset Dataset::labeled() const {
    std::vector<Instance> out;
    for (const auto& i : instances_)
        if (i.labeled()) out.push_back(i);
    return Dataset(schema_, std::move(out), provenance_);
}

Dataset Dataset::unlabeled() const {
    std::vector<Instance> out;
    for (const auto& i : instances_)
        if (!i.labeled()) out.push_back(i);
    return Dataset(schema_, std::move(out), provenance_);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Instance> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(instances_.at(i));
    return Dataset(schema_, std::move(out), provenance_);
}

Dataset Dataset::with_instances(std::vector<Instance> instances, std::string provenance) const {
    return Dataset(schema_, std::move(instances), std::move(provenance));
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    bool any = false;
    char c;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
        record.clear();
        any = false;
    };
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field_started && field.empty()) {
                    quoted = true;
                    field_started = true;
                } else {
                    field.push_back(c);
                }
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (in.peek() == '\n') in.get(c);
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (quoted) throw DataError("csv: unterminated quoted field");
    if (any) end_record();
    return records;
}

std::string quote_csv_field(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

Dataset read_csv(std::istream& in, Schema schema, const std::string& source) {
    auto records = parse_csv(in);
    if (records.empty()) throw DataError(source + ": missing header row");
    const auto& header = records.front();

    std::map<std::string, std::size_t> position;
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto name = trim(header[c]);
        if (c == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name = trim(name.substr(3));  // UTF-8 BOM
        if (!position.emplace(name, c).second)
            throw DataError(source + ": duplicate header column '" + name + "'");
    }
    if (!position.count(schema.target()))
        throw DataError(source + ": target column not found: '" + schema.target() + "'");
    for (const auto& col : schema.columns())
        if (!position.count(col.name))
            throw DataError(source + ": schema mismatch: column '" + col.name + "' not in header");
    if (header.size() != schema.columns().size()) {
        for (const auto& [name, _] : position) {
            const bool known = std::any_of(schema.columns().begin(), schema.columns().end(),
                                           [&](const Column& c) { return c.name == name; });
            if (!known) throw DataError(source + ": schema mismatch: unexpected column '" + name + "'");
        }
    }

    const auto target_pos = position.at(schema.target());
    std::optional<std::size_t> id_pos;
    if (schema.id()) id_pos = position.at(*schema.id());
    std::vector<std::size_t> feature_pos;
    for (const auto& f : schema.features()) feature_pos.push_back(position.at(f.name));

    std::vector<Instance> instances;
    instances.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& row = records[r];
        const auto where = [&](const std::string& col) {
            return source + ": row " + std::to_string(r) + ", column '" + col + "'";
        };
        if (row.size() != header.size())
            throw DataError(source + ": row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(header.size()));
        Instance inst;
        inst.uid = r - 1;
        inst.x.resize(feature_pos.size());
        for (std::size_t f = 0; f < feature_pos.size(); ++f) {
            const auto& cell = row[feature_pos[f]];
            const auto& feat = schema.features()[f];
            if (is_missing_token(cell)) throw DataError(where(feat.name) + ": missing feature value");
            if (feat.numeric()) {
                const auto v = parse_real(cell);
                if (!v) throw DataError(where(feat.name) + ": unparseable numeric value '" + cell + "'");
                inst.x[f] = *v;
            } else {
                inst.x[f] = static_cast<double>(schema.intern(f, trim(cell)));
            }
        }
        const auto& tcell = row[target_pos];
        if (!is_missing_token(tcell)) {
            const auto v = parse_real(tcell);
            if (!v) throw DataError(where(schema.target()) + ": unparseable numeric value '" + tcell + "'");
            inst.y = *v;
        }
        if (id_pos) inst.key = row[*id_pos];
        instances.push_back(std::move(inst));
    }
    return Dataset(std::make_shared<const Schema>(std::move(schema)), std::move(instances),
                   "csv:" + source);
}

Dataset load_csv(const std::filesystem::path& path, Schema schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_csv(in, std::move(schema), path.string());
}

void write_csv(const Dataset& d, std::ostream& out) {
    const auto& schema = d.schema();
    const auto& cols = schema.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << quote_csv_field(cols[c].name);
    out << '\n';
    for (const auto& inst : d.instances()) {
        std::size_t f = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out << ',';
            if (cols[c].name == schema.target()) {
                out << (inst.y ? format_real(*inst.y) : "?");
            } else if (schema.id() && cols[c].name == *schema.id()) {
                out << quote_csv_field(inst.key);
            } else {
                const auto& feat = schema.features()[f];
                const double v = inst.x[f];
                if (feat.numeric())
                    out << format_real(v);
                else
                    out << quote_csv_field(feat.categories.at(static_cast<std::size_t>(v)));
                ++f;
            }
        }
        out << '\n';
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_csv(d, out);
}

// ---------------------------------------------------------------------------
// Splitting

std::pair<Dataset, Dataset> split_labeled(const Dataset& d, double ur, std::uint64_t seed) {
    if (!(ur >= 0.0 && ur < 1.0)) throw ConfigError("unlabeled ratio must lie in [0, 1)");
    if (!d.fully_labeled()) throw DataError("split_labeled: input must be fully labeled");
    const auto n = d.size();
    const auto masked = static_cast<std::size_t>(std::llround(ur * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng.engine());

    std::vector<bool> hide(n, false);
    for (std::size_t i = 0; i < masked; ++i) hide[order[i]] = true;

    std::vector<Instance> labeled;
    std::vector<Instance> unlabeled;
    for (std::size_t i = 0; i < n; ++i) {
        if (hide[i]) {
            Instance inst = d[i];
            inst.y.reset();
            unlabeled.push_back(std::move(inst));
        } else {
            labeled.push_back(d[i]);
        }
    }
    return {d.with_instances(std::move(labeled), d.provenance()),
            d.with_instances(std::move(unlabeled), d.provenance())};
}

std::vector<Fold> kfold(const Dataset& d, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("kfold: k must be at least 2");
    const auto n = d.size();
    if (k > n) throw DataError("kfold: k = " + std::to_string(k) + " exceeds dataset size " + std::to_string(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng.engine());

    std::vector<Fold> folds;
    folds.reserve(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        std::vector<bool> in_test(n, false);
        for (std::size_t i = start; i < start + len; ++i) in_test[order[i]] = true;
        std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(start + len));
        std::sort(test_idx.begin(), test_idx.end());
        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - len);
        for (std::size_t i = 0; i < n; ++i)
            if (!in_test[i]) train_idx.push_back(i);
        folds.push_back(Fold{d.subset(train_idx), d.subset(test_idx)});
        start += len;
    }
    return folds;
}

void SplitSpec::validate() const {
    if (!(unlabeled_ratio >= 0.0 && unlabeled_ratio < 1.0))
        throw ConfigError("unlabeled_ratio must lie in [0, 1)");
    if (folds < 2) throw ConfigError("folds must be at least 2");
}

InstanceId synthetic_uid(std::uint64_t seed, std::uint64_t ordinal) {
    return synthetic_uid_bit | (derive_seed(seed, "synthetic-uid", ordinal) >> 1);
}

}  // namespace ssrforge
