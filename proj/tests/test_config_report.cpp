#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include <sparse_afe/config_io.hpp>
#include <sparse_afe/report.hpp>

using namespace sparse_afe;

namespace {

std::string key_path_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key_path;
    }
    return "<accepted>";
}

ExperimentResult synthetic_result(std::size_t n, std::vector<std::string> labels, double value) {
    ExperimentResult r;
    r.config.iterations = n;
    r.config.roster.clear();
    for (auto& l : labels) {
        AlgorithmResult e;
        e.label     = l;
        e.curve.msd.assign(n, value);
        e.curve.trials = 3;
        r.entries.push_back(std::move(e));
    }
    return r;
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t c = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) {
        ++c;
    }
    return c;
}

} // namespace

TEST(ParseConfig, MinimalDocumentUsesDefaults) {
    const auto c = parse_config(R"({"sparsity_m": 1})");
    EXPECT_EQ(c.channel_length, 16u);
    EXPECT_EQ(c.snr_db, 30.0);
    EXPECT_EQ(c.trials, 200u);
    EXPECT_EQ(c.iterations, 1000u);
    EXPECT_EQ(c.scenario, Scenario::stationary);
    EXPECT_EQ(c.roster, table_presets(1));
}

TEST(ParseConfig, TrackingDefaults) {
    const auto c = parse_config(R"({"sparsity_m": 4, "scenario": "tracking"})");
    EXPECT_EQ(c.iterations, 2000u);
    EXPECT_EQ(c.change_at, 1000u);
    EXPECT_EQ(c.roster, table_presets(4));
}

TEST(ParseConfig, NoPresetWithoutRoster) {
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 3})"), "roster");
    EXPECT_NO_THROW(parse_config(R"({"sparsity_m": 3, "roster": [{"algorithm": "lms", "mu": 0.01}]})"));
}

TEST(ParseConfig, ErrorsCarryKeyPaths) {
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "snr": 30})"), "snr");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "trials": -5})"), "trials");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "trials": 2.5})"), "trials");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "snr_db": "high"})"), "snr_db");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 17})"), "sparsity_m");
    EXPECT_EQ(key_path_of(R"({"channel_length": 16})"), "sparsity_m");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "scenario": "random-walk"})"), "scenario");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "change_at": 10})"), "change_at");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "scenario": "tracking", "iterations": 100, "change_at": 100})"),
              "change_at");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "roster": [{"algorithm": "lms"}, {"algorithm": "nlms", "rho": 1}]})"),
              "roster[1].rho");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "roster": [{"algorithm": "rls"}]})"), "roster[0].algorithm");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "roster": [{"algorithm": "lmmn", "alpha0": 2}]})"), "roster[0]");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1, "roster": [{"algorithm": "lms", "label": "a,b"}]})"),
              "roster[0].label");
    EXPECT_EQ(key_path_of(R"({"sparsity_m": 1,)"), "");
    EXPECT_EQ(key_path_of(R"([1, 2])"), "");
}

TEST(ParseConfig, SerializeRoundTrip) {
    for (const char* doc :
         {R"({"sparsity_m": 1})", R"({"sparsity_m": 4, "scenario": "tracking", "master_seed": 12345678901})",
          R"({"sparsity_m": 2, "channel_length": 32, "snr_db": 17.25, "unit_energy": false, "roster": [
               {"label": "fast", "algorithm": "lms", "mu": 0.013},
               {"algorithm": "zalms", "mu": 0.004, "rho": 1e-5},
               {"algorithm": "nlms", "mu": 0.5, "epsilon": 0.001},
               {"label": "mixed", "algorithm": "lmmn", "mu": 0.002, "alpha0": 0.4}]})"}) {
        const auto c  = parse_config(doc);
        const auto c2 = parse_config_document(serialize_config(c));
        EXPECT_EQ(c, c2) << doc;
        EXPECT_EQ(serialize_config(c2), serialize_config(c));
    }
}

TEST(FormatNumber, NineSignificantDigits) {
    EXPECT_EQ(format_number(to_db(0.001)), "-30.0000000");
    EXPECT_EQ(format_number(0.0), "0.00000000");
    EXPECT_EQ(format_number(-3.0102999566398121), "-3.01029996");
    EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(RenderCsv, ShapeAndHeader) {
    const auto r   = synthetic_result(1000, {"LMS", "ZA-LMS", "NLMS", "LMMN"}, 0.001);
    const auto csv = render_csv(r);
    EXPECT_EQ(count(csv, "\n"), 1001u);
    EXPECT_EQ(count(csv, "\r"), 0u);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,LMS_msd_db,ZA-LMS_msd_db,NLMS_msd_db,LMMN_msd_db");
    const auto second = csv.substr(csv.find('\n') + 1);
    EXPECT_EQ(second.substr(0, second.find('\n')), "0,-30.0000000,-30.0000000,-30.0000000,-30.0000000");
}

TEST(RenderCsv, LinearColumns) {
    const auto csv = render_csv(synthetic_result(2, {"A"}, 0.25), {.linear = true});
    EXPECT_EQ(csv, "iteration,A_msd\n0,0.250000000\n1,0.250000000\n");
}

TEST(ParseCurvesCsv, ReadsBackDbAndLinear) {
    auto r = synthetic_result(5, {"A", "B"}, 0.01);
    r.entries[1].curve.msd[2] = 0.1;
    for (bool linear : {false, true}) {
        const auto t = parse_curves_csv(render_csv(r, {.linear = linear}));
        ASSERT_EQ(t.labels, (std::vector<std::string>{"A", "B"}));
        ASSERT_EQ(t.db[0].size(), 5u);
        EXPECT_NEAR(t.db[0][0], -20.0, 1e-6);
        EXPECT_NEAR(t.db[1][2], -10.0, 1e-6);
    }
    EXPECT_THROW(parse_curves_csv("k,A\n"), ShapeError);
    EXPECT_THROW(parse_curves_csv("iteration,A_msd_db\n0,1,2\n"), ShapeError);
    EXPECT_THROW(parse_curves_csv("iteration,A_foo\n"), ShapeError);
}

TEST(Summary, RecordsPerAlgorithm) {
    auto r                          = synthetic_result(10, {"A", "B"}, 0.5);
    r.entries[0].steady_state_db    = -3.0;
    r.entries[0].convergence_iteration = 4;
    r.entries[1].diverged_trials    = 2;
    r.entries[1].diagnostic         = "B diverged in trial 0: boom";
    const auto j                    = summary_json(r);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["label"], "A");
    EXPECT_EQ(j[0]["steady_state_db"], -3.0);
    EXPECT_EQ(j[0]["convergence_iteration"], 4);
    EXPECT_EQ(j[0]["trials"], 3);
    EXPECT_EQ(j[0]["diverged_trials"], 0);
    EXPECT_TRUE(j[1]["steady_state_db"].is_null());
    EXPECT_EQ(j[1]["diverged_trials"], 2);
}

TEST(RenderSvg, OneLinePerAlgorithm) {
    auto r = synthetic_result(50, {"LMS", "ZA-LMS", "NLMS", "LMMN"}, 0.1);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t k = 0; k < 50; ++k) {
            r.entries[i].curve.msd[k] = std::pow(0.9, static_cast<double>(k * (i + 1)));
        }
    }
    const auto svg = render_svg(curve_table(r), plot_title(r.config));
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_EQ(count(svg, "<polyline"), 4u);
    for (const char* label : {">LMS<", ">ZA-LMS<", ">NLMS<", ">LMMN<", ">Iteration<", ">MSD (dB)<"}) {
        EXPECT_NE(svg.find(label), std::string::npos) << label;
    }
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(EmitPlot, EmptyResultWritesNothing) {
    const auto path = std::filesystem::temp_directory_path() / "sparse_afe_empty_plot.svg";
    std::filesystem::remove(path);
    ExperimentResult empty;
    EXPECT_THROW(emit_plot(empty, path), ShapeError);
    EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(EmitCsv, UnwritablePathIsIoError) {
    EXPECT_THROW(emit_csv(synthetic_result(2, {"A"}, 1.0), "/nonexistent-dir/x/curves.csv"), IoError);
}
