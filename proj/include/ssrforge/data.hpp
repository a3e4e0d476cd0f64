#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ssrforge {

enum class FeatureKind { numeric, nominal };

struct Column {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
};

/// A feature column as seen by the learners. Nominal values are stored as codes
/// into `categories`.
struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> categories;

    bool numeric() const { return kind == FeatureKind::numeric; }
};

/// Column typing of a table. `columns` is in file order and includes the target
/// and the optional id column; `features` is everything else, in the same order.
class Schema {
public:
    Schema() = default;
    Schema(std::vector<Column> columns, std::string target,
           std::optional<std::string> id = std::nullopt);

    const std::vector<Column>& columns() const { return columns_; }
    const std::string& target() const { return target_; }
    const std::optional<std::string>& id() const { return id_; }
    const std::vector<Feature>& features() const { return features_; }
    std::size_t arity() const { return features_.size(); }

    /// Code for a category token, adding it when unseen.
    std::size_t intern(std::size_t feature, const std::string& token);
    /// Code for a category token or nullopt.
    std::optional<std::size_t> find_category(std::size_t feature,
                                             const std::string& token) const;

    /// Sidecar schema file (JSON): {"columns":[{"name":..,"kind":..}],"target":..,"id":..}
    static Schema read_json(const std::filesystem::path& path);
    static Schema parse_json(const std::string& text);
    std::string to_json() const;
    void write_json(const std::filesystem::path& path) const;

private:
    std::vector<Column> columns_;
    std::string target_;
    std::optional<std::string> id_;
    std::vector<Feature> features_;
};

using InstanceId = std::uint64_t;

/// One row. `x` holds numeric values as-is and nominal values as category codes.
struct Instance {
    std::vector<double> x;
    std::optional<double> y;
    InstanceId uid = 0;
    std::string key;  // id-column token, empty when the schema has no id column

    bool labeled() const { return y.has_value(); }
};

/// Immutable-by-convention table; every transformation returns a new Dataset.
class Dataset {
public:
    Dataset() : schema_(std::make_shared<Schema>()) {}
    Dataset(std::shared_ptr<const Schema> schema, std::vector<Instance> instances,
            std::string provenance = {});

    const Schema& schema() const { return *schema_; }
    const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
    const std::vector<Instance>& instances() const { return instances_; }
    const Instance& operator[](std::size_t i) const { return instances_[i]; }
    std::size_t size() const { return instances_.size(); }
    bool empty() const { return instances_.empty(); }
    const std::string& provenance() const { return provenance_; }

    std::size_t labeled_count() const;
    std::size_t unlabeled_count() const { return size() - labeled_count(); }
    bool fully_labeled() const { return labeled_count() == size(); }

    /// Targets of the labeled instances, in order.
    std::vector<double> targets() const;
    Dataset labeled() const;
    Dataset unlabeled() const;
    Dataset subset(std::span<const std::size_t> indices) const;
    Dataset with_instances(std::vector<Instance> instances, std::string provenance) const;

private:
    std::shared_ptr<const Schema> schema_;
    std::vector<Instance> instances_;
    std::string provenance_;
};

/// Reads an RFC-4180 CSV with a header row. Empty target cells and `?` are MISSING.
Dataset load_csv(const std::filesystem::path& path, Schema schema);
Dataset read_csv(std::istream& in, Schema schema, const std::string& source = "<stream>");
void write_csv(const Dataset& d, const std::filesystem::path& path);
void write_csv(const Dataset& d, std::ostream& out);

/// RFC-4180 records, quoted fields may span lines. CRLF and LF both end a record.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
/// Quotes a field when it contains a delimiter, quote, or line break.
std::string quote_csv_field(const std::string& field);

/// Masks the targets of round(ur * |d|) uniformly chosen instances.
std::pair<Dataset, Dataset> split_labeled(const Dataset& d, double ur, std::uint64_t seed);

struct Fold {
    Dataset train;
    Dataset test;
};

/// k shuffled folds with test sizes differing by at most one.
std::vector<Fold> kfold(const Dataset& d, std::size_t k, std::uint64_t seed);

struct SplitSpec {
    double unlabeled_ratio = 0.8;
    std::size_t folds = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Identities of instances created by the samplers carry the top bit, so they
/// never collide with row numbers assigned at load time.
constexpr InstanceId synthetic_uid_bit = InstanceId{1} << 63;
InstanceId synthetic_uid(std::uint64_t seed, std::uint64_t ordinal);

}  // namespace ssrforge
