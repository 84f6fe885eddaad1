#include "commands.h"
#include "job_config.h"

#include "fssecm/errors.h"
#include "fssecm/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace fssecm;
using nlohmann::json;

namespace {

const json prototype_design = json::parse(R"({
  "order": "first",
  "circuit": {"Ls_nH": 4.9, "Cs_pF": 0.5, "Lp_nH": 4.0, "Cp_pF": 0.35, "Lpar_nH": 0.8},
  "substrate": {"h_mm": 0.635, "eps_r": 10.2, "tan_delta": 0.0023}
})");

const json wide_sweep = json::parse(R"({"start_ghz": 0.5, "stop_ghz": 12, "points": 1401})");

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        m_dir = fs::temp_directory_path() / (std::string("fssecm_cli_") + info->name());
        fs::remove_all(m_dir);
        fs::create_directories(m_dir);
    }
    void TearDown() override { fs::remove_all(m_dir); }

    fs::path write_config(const json& doc, const std::string& name = "job.json") {
        const fs::path p = m_dir / name;
        std::ofstream(p) << doc.dump(2);
        return p;
    }

    int run(const std::string& command, const fs::path& config, const std::string& out,
            cli::run_options opts = {}) {
        m_err.str("");
        return cli::run(command, config, m_dir / out, opts, m_err);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    static std::map<std::string, std::string> key_values(const fs::path& p) {
        std::map<std::string, std::string> out;
        std::ifstream in(p);
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) {
                out[line.substr(0, eq)] = line.substr(eq + 3);
            }
        }
        return out;
    }

    fs::path m_dir;
    std::ostringstream m_err;
};

} // namespace

TEST_F(CliTest, AnalyzeReportsTransmissionZero) {
    const auto cfg = write_config({{"design", prototype_design}, {"sweep", wide_sweep}});
    ASSERT_EQ(run("analyze", cfg, "out"), 0) << m_err.str();
    const auto report = key_values(m_dir / "out" / "band_report.txt");
    EXPECT_NEAR(std::stod(report.at("f0_ghz")), 3.2152, 0.001);
    EXPECT_EQ(report.at("poles_l"), "1");
    EXPECT_TRUE(fs::exists(m_dir / "out" / "response.csv"));
    EXPECT_TRUE(fs::exists(m_dir / "out" / "response.s2p"));
    const json meta = json::parse(slurp(m_dir / "out" / "run.json"));
    EXPECT_EQ(meta["command"], "analyze");
    EXPECT_EQ(meta["outputs"].size(), 3u);
}

TEST_F(CliTest, GeometryDesignMatchesExtractedCircuit) {
    json design = json::parse(R"({
      "geometry": {"a_mm": 8.5, "w_mm": 6.8, "s_mm": 0.3, "s1_mm": 0.2, "g_mm": 0.5},
      "substrate": {"h_mm": 0.635, "eps_r": 10.2},
      "Lpar_nH": 0.8
    })");
    const auto cfg = write_config({{"design", design}, {"sweep", wide_sweep}});
    ASSERT_EQ(run("analyze", cfg, "out"), 0) << m_err.str();
    const auto report = key_values(m_dir / "out" / "band_report.txt");
    const double f0 = 1.0 / (2 * 3.141592653589793 * std::sqrt(4.918046585668135e-09 *
                                                                 5.115165333588338e-13));
    EXPECT_NEAR(std::stod(report.at("f0_ghz")) * 1e9 / f0, 1.0, 1e-9);
}

TEST_F(CliTest, OutputsAreByteIdenticalOnRerun) {
    const auto cfg = write_config({{"design", prototype_design}, {"sweep", wide_sweep}});
    ASSERT_EQ(run("analyze", cfg, "a"), 0);
    ASSERT_EQ(run("analyze", cfg, "b"), 0);
    for (const char* name : {"response.csv", "response.s2p", "band_report.txt", "run.json"}) {
        EXPECT_EQ(slurp(m_dir / "a" / name), slurp(m_dir / "b" / name)) << name;
    }
}

TEST_F(CliTest, ResponseCsvRoundTripsThroughImporter) {
    const auto cfg = write_config({{"design", prototype_design}, {"sweep", wide_sweep}});
    ASSERT_EQ(run("analyze", cfg, "out"), 0);
    const response_table csv = io::import_response(m_dir / "out" / "response.csv");
    const response_table ts = io::import_response(m_dir / "out" / "response.s2p");
    ASSERT_EQ(csv.size(), 1401u);
    for (std::size_t i = 0; i < csv.size(); ++i) {
        EXPECT_EQ(csv[i].frequency, ts[i].frequency);
        EXPECT_LT(std::abs(csv[i].s21 - ts[i].s21), 1e-11);
    }
}

TEST_F(CliTest, EmptySweepFails) {
    json doc = {{"design", prototype_design},
                {"sweep", wide_sweep},
                {"parametric", {{"param", "Ls_nH"}, {"values", json::array()}}}};
    ASSERT_EQ(run("sweep", write_config(doc), "out"), 1);
    const std::string err = m_err.str();
    EXPECT_EQ(err.rfind("error: empty_sweep: ", 0), 0u) << err;
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
}

TEST_F(CliTest, GeometrySweepKeepsZeroFixed) {
    json doc = json::parse(R"({
      "design": {
        "geometry": {"a_mm": 5, "w_mm": 3, "s_mm": 0.15, "s1_mm": 0.15, "g_mm": 0.2},
        "substrate": {"h_mm": 0.254, "eps_r": 10.2}
      },
      "sweep": {"start_ghz": 0.5, "stop_ghz": 40, "points": 4001},
      "parametric": {"param": "s1", "values": [0.1, 0.3, 0.5]}
    })");
    ASSERT_EQ(run("sweep", write_config(doc), "out"), 0) << m_err.str();
    std::ifstream in(m_dir / "out" / "parametric.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "value,f_l_hz,f_u_hz,f0_hz,bw_l,bw_u,il_l_db,il_u_db,delta_f_hz,poles_l,poles_u,error");
    std::vector<std::string> f0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            cells.push_back(c);
        }
        ASSERT_GE(cells.size(), 4u);
        f0.push_back(cells[3]);
    }
    ASSERT_EQ(f0.size(), 3u);
    EXPECT_EQ(f0[0], f0[1]);
    EXPECT_EQ(f0[1], f0[2]);
}

TEST_F(CliTest, SweepRecordsPerPointErrors) {
    json doc = {{"design", prototype_design},
                {"sweep", wide_sweep},
                {"parametric", {{"param", "Ls_nH"}, {"values", {4.9, 60.0}}}}};
    ASSERT_EQ(run("sweep", write_config(doc), "out"), 0) << m_err.str();
    const std::string text = slurp(m_dir / "out" / "parametric.csv");
    EXPECT_NE(text.find(",,,,,,,,,,,"), std::string::npos);
}

TEST_F(CliTest, NormalIncidencePolarizationsMatch) {
    json doc = {{"design", prototype_design},
                {"sweep", wide_sweep},
                {"incidence", {{"theta_deg", {0}}, {"polarization", {"TE", "TM"}}}}};
    ASSERT_EQ(run("angular", write_config(doc), "out"), 0) << m_err.str();
    const std::string te = slurp(m_dir / "out" / "response_theta0_TE.csv");
    const std::string tm = slurp(m_dir / "out" / "response_theta0_TM.csv");
    EXPECT_FALSE(te.empty());
    EXPECT_EQ(te, tm);
}

TEST_F(CliTest, ObliqueAnglesGiveOneFilePerPair) {
    json doc = {{"design", prototype_design},
                {"sweep", wide_sweep},
                {"incidence", {{"theta_deg", {0, 30, 45}}, {"polarization", {"TE", "TM"}}}}};
    ASSERT_EQ(run("angular", write_config(doc), "out"), 0) << m_err.str();
    EXPECT_TRUE(fs::exists(m_dir / "out" / "response_theta45_TM.csv"));
    EXPECT_NE(slurp(m_dir / "out" / "response_theta30_TE.csv"),
              slurp(m_dir / "out" / "response_theta30_TM.csv"));
}

TEST_F(CliTest, ConfigErrorsNameKeyAndUnit) {
    json doc = {{"design", prototype_design}};
    doc["design"]["substrate"]["h_mm"] = "thick";
    ASSERT_EQ(run("analyze", write_config(doc), "out"), 1);
    EXPECT_EQ(m_err.str(), "error: config: design.substrate.h_mm: expected a number in mm\n");

    doc = {{"design", prototype_design}};
    doc["design"]["circuit"].erase("Cs_pF");
    ASSERT_EQ(run("analyze", write_config(doc), "out"), 1);
    EXPECT_EQ(m_err.str(),
              "error: config: design.circuit.Cs_pF: missing, expected a number in pF\n");

    doc = {{"design", prototype_design}, {"sweep", {{"start_ghz", 1}, {"stop_ghz", "8"}}}};
    ASSERT_EQ(run("analyze", write_config(doc), "out"), 1);
    EXPECT_NE(m_err.str().find("sweep.stop_ghz: expected a number in GHz"), std::string::npos);

    ASSERT_EQ(run("analyze", m_dir / "nope.json", "out"), 1);
    EXPECT_EQ(m_err.str().rfind("error: config: ", 0), 0u);

    std::ofstream(m_dir / "bad.json") << "{ not json";
    ASSERT_EQ(run("analyze", m_dir / "bad.json", "out"), 1);
    EXPECT_EQ(m_err.str().rfind("error: config: malformed JSON", 0), 0u);
}

TEST_F(CliTest, BothGeometryAndCircuitRejected) {
    json doc = {{"design", prototype_design}};
    doc["design"]["geometry"] = {{"a_mm", 8.5}};
    ASSERT_EQ(run("analyze", write_config(doc), "out"), 1);
    EXPECT_NE(m_err.str().find("exactly one of"), std::string::npos);
}

TEST_F(CliTest, UnknownCommand) {
    const auto cfg = write_config({{"design", prototype_design}});
    EXPECT_EQ(run("plot", cfg, "out"), 1);
}

TEST_F(CliTest, SynthesisProducesLoadableDesign) {
    json doc = {{"design", {{"substrate", {{"h_mm", 0.635}, {"eps_r", 10.2}}},
                            {"circuit", prototype_design["circuit"]}}},
                {"targets", {{"fl_ghz", 2.386}, {"fu_ghz", 4.252}, {"f0_ghz", 3.2152},
                             {"a_mm", 8.5}}}};
    ASSERT_EQ(run("synth", write_config(doc), "out"), 0) << m_err.str();
    const auto report = key_values(m_dir / "out" / "synth_report.txt");
    EXPECT_NEAR(std::stod(report.at("Ls_nH")), 4.9, 0.01);
    EXPECT_NEAR(std::stod(report.at("f0_ghz")), 3.2152, 1e-9);

    json design = json::parse(slurp(m_dir / "out" / "synth_design.json"));
    design["sweep"] = wide_sweep;
    const fs::path cfg2 = write_config(design, "synth_job.json");
    const cli::job_config parsed = cli::load_config(cfg2);
    ASSERT_TRUE(parsed.design.geometry);
    const extracted_circuit c = extract_circuit(*parsed.design.geometry);
    EXPECT_NEAR(c.l_s / 4.9e-9, 1.0, 1e-3);
    EXPECT_NEAR(c.c_p / 0.35e-12, 1.0, 1e-3);
}

TEST_F(CliTest, InfeasibleTargetsReportCategory) {
    json doc = {{"design", prototype_design},
                {"targets", {{"fl_ghz", 2.4}, {"fu_ghz", 5.8}, {"f0_ghz", 6.0}, {"a_mm", 8.5}}}};
    ASSERT_EQ(run("synth", write_config(doc), "out"), 1);
    EXPECT_EQ(m_err.str().rfind("error: infeasible_targets: ", 0), 0u) << m_err.str();
}

TEST_F(CliTest, FitRecoversCircuitFromExportedResponse) {
    const auto truth = write_config({{"design", prototype_design}, {"sweep", wide_sweep}});
    ASSERT_EQ(run("analyze", truth, "data"), 0);
    json guess = prototype_design;
    guess["circuit"] = {{"Ls_nH", 5.3}, {"Cs_pF", 0.46}, {"Lp_nH", 4.3}, {"Cp_pF", 0.33},
                        {"Lpar_nH", 0.9}};
    json doc = {{"design", guess}, {"fit", {{"data", "data/response.s2p"}}}};
    ASSERT_EQ(run("fit", write_config(doc), "out"), 0) << m_err.str();
    const auto values = key_values(m_dir / "out" / "fit_result.txt");
    EXPECT_NEAR(std::stod(values.at("Ls_nH")), 4.9, 0.049);
    EXPECT_NEAR(std::stod(values.at("Cp_pF")), 0.35, 0.0035);
    EXPECT_LT(std::stod(values.at("rms")), 1e-8);
    std::ifstream trace(m_dir / "out" / "fit_trace.csv");
    std::string header;
    std::getline(trace, header);
    EXPECT_EQ(header, "iteration,rms,damping,window_hz");
}

TEST_F(CliTest, FitIterationCapWritesBestAndFails) {
    const auto truth = write_config({{"design", prototype_design}, {"sweep", wide_sweep}});
    ASSERT_EQ(run("analyze", truth, "data"), 0);
    json guess = prototype_design;
    guess["circuit"]["Ls_nH"] = 5.5;
    json doc = {{"design", guess}, {"fit", {{"data", "data/response.csv"}, {"max_iterations", 1}}}};
    ASSERT_EQ(run("fit", write_config(doc), "out"), 1);
    EXPECT_EQ(m_err.str().rfind("error: diverged: ", 0), 0u) << m_err.str();
    EXPECT_TRUE(fs::exists(m_dir / "out" / "fit_result.txt"));
    EXPECT_TRUE(fs::exists(m_dir / "out" / "fit_trace.csv"));
}

TEST_F(CliTest, SmoothingFlagIsApplied) {
    const auto cfg = write_config({{"design", prototype_design}, {"sweep", wide_sweep}});
    cli::run_options opts;
    opts.smooth_ghz = 0.1;
    // The 0.9% lower band does not survive a 0.1 GHz average.
    ASSERT_EQ(run("analyze", cfg, "smooth", opts), 1);
    EXPECT_EQ(m_err.str(), "error: band_structure: expected exactly two passbands, found 1\n");

    opts.smooth_ghz = 0.02;
    ASSERT_EQ(run("analyze", cfg, "narrow", opts), 0) << m_err.str();
    ASSERT_EQ(run("analyze", cfg, "raw"), 0);
    const auto raw = key_values(m_dir / "raw" / "band_report.txt");
    const auto narrow = key_values(m_dir / "narrow" / "band_report.txt");
    EXPECT_NE(raw.at("il_l_db"), narrow.at("il_l_db"));
    EXPECT_NEAR(std::stod(narrow.at("f0_ghz")), std::stod(raw.at("f0_ghz")), 0.01);
}
