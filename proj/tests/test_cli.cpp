#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpsvm/cli.hpp"
#include "dpsvm/mechanisms.hpp"
#include "dpsvm/model_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using dpsvm::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("dpsvm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
        std::ofstream(path("d.csv")) << "1,0,1\n-1,0,-1\n";
        std::ofstream(path("xs.csv")) << "2,0\n-2,0\n";
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, TrainAndPredictLinear) {
    const auto t = call({"train", "--data", path("d.csv"), "--c", "2", "--out", path("m.json")});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_EQ(nlohmann::json::parse(t.out)["trained"]["kernel"]["family"], "linear");
    const auto p = call({"predict", "--model", path("m.json"), "--data", path("xs.csv"), "--unlabeled"});
    ASSERT_EQ(p.code, 0) << p.err;
    std::istringstream lines(p.out);
    double v1, v2;
    std::string s1, s2;
    lines >> v1 >> s1 >> v2 >> s2;
    EXPECT_NEAR(v1, 2.0, 1e-8);
    EXPECT_EQ(s1, "+1");
    EXPECT_NEAR(v2, -2.0, 1e-8);
    EXPECT_EQ(s2, "-1");
}

TEST_F(CliTest, TrainRbfWritesModel) {
    const auto t = call({"train", "--data", path("d.csv"), "--kernel", "rbf", "--sigma", "1.0", "--c", "1.0",
                         "--out", path("m.json")});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_TRUE(fs::exists(path("m.json")));
}

TEST_F(CliTest, ZeroModelPredictsPlusOneOnTies) {
    dpsvm::PrivateModel m;
    m.w_hat = {0.0, 0.0};
    m.dim = 2;
    m.n = 2;
    m.C = 1.0;
    m.lambda = 1.0;
    dpsvm::save_model(m, path("zero.json"));
    const auto p = call({"predict", "--model", path("zero.json"), "--data", path("xs.csv"), "--unlabeled"});
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_EQ(p.out, "0 +1\n0 +1\n");
}

TEST_F(CliTest, RandomizedCommandsRequireSeed) {
    const auto a = call({"private-train-finite", "--data", path("d.csv"), "--c", "1", "--lambda", "0.1", "--out",
                         path("p.json")});
    EXPECT_EQ(a.code, 2);
    EXPECT_FALSE(fs::exists(path("p.json")));
    const auto b = call({"private-train-rff", "--data", path("d.csv"), "--c", "1", "--lambda", "0.1", "--d-hat",
                         "5", "--out", path("p.json")});
    EXPECT_EQ(b.code, 2);
    EXPECT_EQ(call({"audit", "--kind", "sensitivity"}).code, 2);
}

TEST_F(CliTest, SeededReleaseIsReproducible) {
    const std::vector<std::string> base{"private-train-rff", "--data", path("d.csv"), "--c", "1",
                                        "--lambda", "0.1", "--d-hat", "5", "--seed", "11"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a.json")});
    b.insert(b.end(), {"--out", path("b.json")});
    ASSERT_EQ(call(a).code, 0);
    ASSERT_EQ(call(b).code, 0);
    std::ifstream fa(path("a.json")), fb(path("b.json"));
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb);
    const auto doc = nlohmann::json::parse(sa);
    EXPECT_FALSE(doc.contains("alphas"));
    EXPECT_FALSE(doc.contains("entries"));
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"frobnicate"}).code, 2);
    EXPECT_EQ(call({"train", "--data", path("d.csv"), "--kernel", "poly", "--c", "1", "--out", path("m")}).code, 2);
    EXPECT_EQ(call({"calibrate", "--mechanism", "both"}).code, 2);
    EXPECT_EQ(call({"train", "-d", path("d.csv")}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(CliTest, ComputationErrors) {
    std::ofstream(path("bad.csv")) << "1,0,1\n1,2\n";
    EXPECT_EQ(call({"train", "--data", path("bad.csv"), "--c", "1", "--out", path("m.json")}).code, 1);
    EXPECT_EQ(call({"train", "--data", path("missing.csv"), "--c", "1", "--out", path("m.json")}).code, 1);
    ASSERT_EQ(call({"train", "--data", path("d.csv"), "--c", "1", "--out", path("m.json")}).code, 0);
    std::ofstream(path("x3.csv")) << "1,2,3\n";
    EXPECT_EQ(call({"predict", "--model", path("m.json"), "--data", path("x3.csv"), "--unlabeled"}).code, 1);
}

TEST_F(CliTest, BoundsRbf) {
    const auto r = call({"bounds", "--lower", "rbf", "--delta", "0.05", "--sigma", "0.3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out)["bounds"];
    EXPECT_EQ(j["N"], 11);
    EXPECT_NEAR(j["bound"].get<double>(), std::log(190.0), 1e-12);
    EXPECT_NEAR(j["bound"].get<double>(), 5.247024, 1e-6);
}

TEST_F(CliTest, CalibrateMatchesLibrary) {
    const auto r = call({"calibrate", "--mechanism", "rff", "--beta", "1", "--eps", "0.5", "--delta", "0.1", "--c",
                         "1", "--n", "100", "--dim", "2", "--sigma", "1", "--diam", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out)["calibration"];
    const auto d_hat = dpsvm::calibrate_rff_dim_hinge(0.5, 0.1, 1.0, 2, std::sqrt(2.0), 2.0);
    const auto lib = dpsvm::calibrate_rff(1, 1, d_hat, 1, 100, 0.5, 0.1);
    EXPECT_EQ(j["d_hat"].get<std::size_t>(), d_hat);
    EXPECT_EQ(j["lambda_min_privacy"].get<double>(), lib.lambda_min_privacy);
    EXPECT_EQ(j["lambda_max_utility"].get<double>(), lib.lambda_max_utility);
    EXPECT_EQ(j["feasible"].get<bool>(), lib.feasible);
}

TEST_F(CliTest, AuditTwoDatabaseConstruction) {
    const auto r = call({"audit", "--kind", "lemma17", "--c", "1", "--n", "10", "--eps", "0.04"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(r.out)["audit"]["pass"].get<bool>());
}
