#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ssrforge/error.hpp"
#include "ssrforge/runner.hpp"
#include "ssrforge/synth.hpp"

using namespace ssrforge;
namespace fs = std::filesystem;

namespace {

Dataset small_benchmark(std::uint64_t seed) {
    auto spec = skewed_benchmark(seed);
    spec.n = 300;
    return generate(spec);
}

ExperimentConfig quick_config(const std::string& models = "knn4,coreg,smogn-coreg") {
    auto cfg = parse_config("[split]\nfolds = 3\nseed = 4\n[models]\nlist = " + models +
                            "\n[smogn]\ntails = low\n[coreg]\nmax_iterations = 40\n");
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "ssrforge_test_runner" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
    const auto cfg = parse_config("");
    EXPECT_EQ(cfg.split.folds, 10u);
    EXPECT_DOUBLE_EQ(cfg.split.unlabeled_ratio, 0.8);
    EXPECT_EQ(cfg.models.size(), 7u);
    EXPECT_EQ(cfg.coreg.max_iterations, 500u);
    const auto c2 = parse_config("[coreg]\npreset = paper-initial\n[smogn]\ncontrol_points = 0:1:0; 0.5:0:0\n");
    EXPECT_EQ(c2.coreg.max_iterations, 100u);
    ASSERT_TRUE(c2.smogn.control_points.has_value());
    EXPECT_EQ(c2.smogn.control_points->size(), 2u);
    const auto c3 = parse_config(default_config_text());
    EXPECT_EQ(c3.models.size(), 7u);
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
    EXPECT_THROW(parse_config("[split]\nfoldz = 3\n"), ConfigError);
    EXPECT_THROW(parse_config("[nope]\na = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[split]\nfolds = three\n"), ConfigError);
    EXPECT_THROW(parse_config("[split]\nunlabeled_ratio = 1.0\n"), ConfigError);
    EXPECT_THROW(parse_config("[models]\nlist = knn4,svm\n"), ConfigError);
    EXPECT_THROW(parse_config("[models]\nlist = knn4,knn4\n"), ConfigError);
    EXPECT_THROW(parse_config("[smogn]\nmode = wild\n"), ConfigError);
}

TEST(Config, RelativePathsFollowTheConfigFile) {
    const auto dir = scratch("paths");
    {
        std::ofstream out(dir / "exp.ini");
        out << "[data]\ninput = d.csv\nschema = /abs/s.json\n[output]\ndir = results\n";
    }
    const auto cfg = load_config(dir / "exp.ini");
    EXPECT_EQ(cfg.input, dir / "d.csv");
    EXPECT_EQ(cfg.schema, fs::path("/abs/s.json"));
    EXPECT_EQ(cfg.output_dir, dir / "results");
}

TEST(Models, Parsing) {
    EXPECT_EQ(parse_model("knn12").k, 12u);
    EXPECT_EQ(parse_model("lr").kind, ModelKind::linear);
    EXPECT_TRUE(parse_model("smogn-coreg").uses_smogn());
    EXPECT_THROW(parse_model("knn0"), ConfigError);
    EXPECT_THROW(parse_model("knn"), ConfigError);
}

TEST(Aggregate, MeanAndSampleSd) {
    const auto a = aggregate({1.0, 2.0, std::nullopt, 6.0});
    EXPECT_EQ(a.n, 3u);
    EXPECT_DOUBLE_EQ(a.mean, 3.0);
    EXPECT_DOUBLE_EQ(a.sd, std::sqrt(7.0));
}

TEST(Runner, ReportStructureAndAggregation) {
    const auto d = small_benchmark(1);
    const auto cfg = quick_config();
    const auto r = run_experiment(d, cfg);
    ASSERT_EQ(r.folds.size(), 3u);
    ASSERT_EQ(r.models.size(), 3u);
    for (const auto& m : r.models) {
        ASSERT_EQ(m.folds.size(), 3u);
        double s = 0.0;
        for (const auto& f : m.folds) s += f.rmse;
        EXPECT_NEAR(m.summary.at("rmse").mean, s / 3.0, 1e-12);
    }
    for (const auto& f : r.folds) {
        EXPECT_EQ(f.train + f.test, d.size());
        EXPECT_EQ(f.labeled, static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(f.train))));
        ASSERT_TRUE(f.smogn.has_value());
        EXPECT_GT(f.smogn->output, 0u);
    }
    EXPECT_EQ(r.leakage_violations, 0u);
    EXPECT_EQ(r.leakage_checks, d.size());
    EXPECT_FALSE(r.history.empty());
    EXPECT_NO_THROW(r.model("coreg"));
    EXPECT_THROW(r.model("lr"), ConfigError);
}

TEST(Runner, ByteIdenticalReports) {
    const auto d = small_benchmark(2);
    const auto cfg = quick_config("knn4,coreg");
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    write_outputs(run_experiment(d, cfg), a);
    write_outputs(run_experiment(d, cfg), b);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "history.csv"), slurp(b / "history.csv"));
    for (const char* f : {"table_r2.csv", "table_pcc.csv", "table_rmse.csv", "table_mae.csv", "run_meta.json"})
        EXPECT_TRUE(fs::exists(a / f)) << f;
    auto other = cfg;
    other.split.seed = 99;
    const auto c = scratch("det_c");
    write_outputs(run_experiment(d, other), c);
    EXPECT_NE(slurp(a / "report.json"), slurp(c / "report.json"));
}

TEST(Runner, NoTestInstanceReachesTraining) {
    const auto d = small_benchmark(3);
    const auto r = run_experiment(d, quick_config("knn4,lr,mssra-knn,coreg,smogn-coreg"));
    EXPECT_EQ(r.leakage_violations, 0u);
    EXPECT_GT(r.leakage_checks, 0u);
}

TEST(Runner, PreexistingUnlabeledRowsJoinU) {
    auto d = small_benchmark(4);
    auto rows = d.instances();
    for (std::size_t i = 0; i < 30; ++i) rows[i].y.reset();
    d = d.with_instances(rows, d.provenance());
    const auto r = run_experiment(d, quick_config("knn4"));
    std::size_t tested = 0;
    for (const auto& f : r.folds) {
        tested += f.test;
        EXPECT_EQ(f.train + f.test, 270u);
        EXPECT_EQ(f.labeled + f.unlabeled, f.train + 30);
    }
    EXPECT_EQ(tested, 270u);
}

TEST(Runner, ErrorsCarryFoldAndModel) {
    const auto d = small_benchmark(5);
    auto cfg = quick_config("knn400");
    try {
        run_experiment(d, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("fold 0, model knn400"), std::string::npos) << e.what();
    }
}

TEST(Histogram, ConservationAndIdentity) {
    const auto d = small_benchmark(6);
    const auto rows = emit_histogram(d, d, 12);
    ASSERT_EQ(rows.size(), 12u);
    std::size_t sb = 0, sa = 0;
    for (const auto& r : rows) {
        EXPECT_EQ(r.before, r.after);
        sb += r.before;
        sa += r.after;
    }
    EXPECT_EQ(sb, d.size());
    EXPECT_EQ(sa, d.size());
    EXPECT_THROW(emit_histogram(d, d, 1), ConfigError);
}

TEST(Histogram, SmognMovesMassTowardTheMinority) {
    const auto d = generate(skewed_benchmark(7));
    auto cfg = quick_config("smogn-coreg");
    cfg.split.unlabeled_ratio = 0.0;
    cfg.coreg.max_iterations = 1;
    const auto r = run_experiment(d, cfg);
    ASSERT_FALSE(r.histogram.empty());
    std::size_t before = 0, after = 0, nb = 0, na = 0;
    for (const auto& h : r.histogram) {
        nb += h.before;
        na += h.after;
        if (h.high <= 0.5) {
            before += h.before;
            after += h.after;
        }
    }
    EXPECT_GT(static_cast<double>(after) / static_cast<double>(na), static_cast<double>(before) / static_cast<double>(nb));
}

TEST(Sweep, OneReportPerRatio) {
    const auto d = generate(skewed_benchmark(8));
    const auto cfg = quick_config("knn4,coreg");
    const std::vector<double> urs{0.5, 0.8, 0.99};
    const auto s = sweep_ur(d, cfg, urs);
    ASSERT_EQ(s.reports.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        for (const auto& f : s.reports[i].folds)
            EXPECT_EQ(f.labeled, f.train - static_cast<std::size_t>(std::llround(urs[i] * static_cast<double>(f.train))));
    const auto dir = scratch("sweep");
    write_sweep_csv(s, dir / "ur_sweep.csv");
    std::ifstream in(dir / "ur_sweep.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "ur,model,metric,mean,sd");
    std::set<std::string> groups;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        groups.insert(line.substr(0, line.find(',')));
        ++lines;
    }
    EXPECT_EQ(groups.size(), 3u);
    EXPECT_EQ(lines, 3u * 2u * 4u);
    EXPECT_THROW(sweep_ur(d, cfg, {1.0}), ConfigError);
}
