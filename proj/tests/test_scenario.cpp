#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "jspec/errors.hpp"
#include "jspec/scenario.hpp"

using namespace jspec;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "jspec_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

nlohmann::json base_config(const std::string& task) {
    return {{"schema_version", 1},
            {"task", task},
            {"model", CoefficientModel::free_model().to_json()},
            {"seed", 42},
            {"params", nlohmann::json::object()}};
}

fs::path write_config(const fs::path& dir, const nlohmann::json& config) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << config.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("scenario validation") {
    CHECK_THROWS_AS(parse_scenario(nlohmann::json{{"task", "mfunc"}}), ValidationError);
    auto bad_version = base_config("mfunc");
    bad_version["schema_version"] = 7;
    CHECK_THROWS_AS(parse_scenario(bad_version), ValidationError);
    auto bad_task = base_config("no-such-task");
    CHECK_THROWS_AS(parse_scenario(bad_task), ValidationError);
    CHECK_NOTHROW(parse_scenario(base_config("mfunc")));
}

TEST_CASE("mfunc run produces the free-model m value") {
    const auto dir = fresh_dir("mfunc");
    auto config = base_config("mfunc");
    config["params"] = {{"z", {0.0, 1.0}}, {"depth", 128}};
    const int code = run_config(write_config(dir, config), dir / "out");
    REQUIRE(code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    const double re = report["result"]["m"][0].get<double>();
    const double im = report["result"]["m"][1].get<double>();
    CHECK(std::abs(re) < 1e-12);
    CHECK(im == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-10));
    CHECK(report["result"]["cross_check_diff"].get<double>() < 1e-6);
    CHECK(report["scenario"]["task"] == "mfunc");
}

TEST_CASE("exit codes: validation failure is 2, non-convergence is 3") {
    const auto dir = fresh_dir("exit_codes");

    SUBCASE("malformed json") {
        const fs::path p = dir / "broken.json";
        std::ofstream(p) << "{ not json";
        CHECK(run_config(p, dir / "out") == 2);
    }
    SUBCASE("unknown task") {
        CHECK(run_config(write_config(dir, base_config("nope")), dir / "out") == 2);
    }
    SUBCASE("bad params") {
        auto config = base_config("subordinacy-scan");
        config["params"] = {{"L_max", 100000}};
        CHECK(run_config(write_config(dir, config), dir / "out") == 2);
    }
    SUBCASE("truncation-sensitive resolvent block") {
        auto config = base_config("lemma-f-check");
        config["params"] = {{"n_values", {1}},
                            {"z_values", {{0.0, 1e-7}}},
                            {"outer_depth", 40},
                            {"tol", 1e-12}};
        CHECK(run_config(write_config(dir, config), dir / "out") == 3);
    }
}

TEST_CASE("reports are byte-identical across reruns") {
    const auto dir = fresh_dir("determinism");
    auto config = base_config("decompose");
    config["model"] = nlohmann::json::parse(
        R"({"window_start":-8,"a":[1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1],
            "b":[0.3,-0.2,0.7,0.1,-0.6,0.4,0.0,0.9,-0.8,0.2,0.5,-0.4,0.1,0.6,-0.3,0.8,-0.1],
            "tail":{"kind":"constant","a_inf":1.0,"b_inf":0.0}})");
    config["params"] = {{"n", 8},
                        {"intervals", {{0.4, 1.1}}},
                        {"functions", {"x", "x^2"}},
                        {"psi", {{"kind", "random"}}}};
    const auto cfg = write_config(dir, config);
    REQUIRE(run_config(cfg, dir / "a") == 0);
    REQUIRE(run_config(cfg, dir / "b") == 0);
    for (const char* f : {"report.json", "q.json", "defects.json"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK_FALSE(slurp(dir / "a" / f).empty());
    }
}

TEST_CASE("subordinacy scan emits the documented csv") {
    const auto dir = fresh_dir("scan");
    auto config = base_config("subordinacy-scan");
    config["params"] = {{"energies", {0.0, 3.0}},
                        {"sides", {"+"}},
                        {"L_max", 2048},
                        {"threshold", 1e-4}};
    REQUIRE(run_config(write_config(dir, config), dir / "out") == 0);
    const std::string csv = slurp(dir / "out" / "scan.csv");
    CHECK(csv.rfind("E,side,status,theta,final_ratio,L_max\n", 0) == 0);
    CHECK(csv.find("none_detected") != std::string::npos);
    CHECK(csv.find("subordinate_angle") != std::string::npos);
    // three lines: header plus one row per energy
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    SUBCASE("output does not depend on the worker count") {
        setenv("JSPEC_THREADS", "3", 1);
        REQUIRE(run_config(write_config(dir, config), dir / "threads3") == 0);
        setenv("JSPEC_THREADS", "1", 1);
        REQUIRE(run_config(write_config(dir, config), dir / "threads1") == 0);
        unsetenv("JSPEC_THREADS");
        CHECK(slurp(dir / "threads3" / "scan.csv") == slurp(dir / "threads1" / "scan.csv"));
        CHECK(slurp(dir / "threads3" / "scan.csv") == csv);
    }
}

TEST_CASE("symmetric demo identifies the two boundary angles") {
    const auto dir = fresh_dir("symmetric");
    auto config = base_config("symmetric-demo");
    // b_0 = b_1 = 2, zero elsewhere: symmetric around 1/2
    config["model"] = nlohmann::json::parse(
        R"({"window_start":0,"a":[1.0,1.0],"b":[2.0,2.0],
            "tail":{"kind":"constant","a_inf":1.0,"b_inf":0.0}})");
    config["params"] = {{"m", 8}};
    REQUIRE(run_config(write_config(dir, config), dir / "out") == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["result"]["worst_angle_distance"].get<double>() < 1e-8);
    CHECK(report["result"]["antisymmetric_projector_distance"].get<double>() < 1e-8);
    CHECK(report["result"]["symmetric_projector_distance"].get<double>() < 1e-8);
}

TEST_CASE("pure point demo reassembles the squared operator") {
    const auto dir = fresh_dir("pure_point");
    auto config = base_config("pure-point-demo");
    config["params"] = {{"n", 10}, {"F", "x^2"}};
    REQUIRE(run_config(write_config(dir, config), dir / "out") == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["result"]["defect"].get<double>() < 1e-9);
}

TEST_CASE("rs sweep csv defects stop shrinking at zero") {
    const auto dir = fresh_dir("rs_sweep");
    auto config = base_config("rs-sweep");
    // model with angle gap 0.033 and all angles clear of {0, pi/2, pi}
    config["model"] = nlohmann::json::parse(R"({"window_start":-6,
        "a":[0.97575387119564005,0.81348591490372324,0.96869101577465799,
             1.1844772514247248,1.139240045637163,1.0926891368462719,1.0,
             1.0720068386718813,1.1207422258285336,1.0969619960060566,
             1.1880770520847701,0.97911133248478044,1.1208614931448222],
        "b":[-0.44836142772062615,0.45082787486762033,-0.38263379624205779,
             -0.095889960673304742,-0.31375529625197562,-0.17657083078036084,
             0.21644002383609517,-0.0055441549469255613,0.27881185602608705,
             0.20186121934253953,0.098176817578198516,0.38912545418888222,
             0.40909349285457453],
        "tail":{"kind":"constant","a_inf":1.0,"b_inf":0.0}})");
    config["params"] = {{"n", 6}, {"F", "x"}, {"min_cells", 4}, {"doublings", 7}};
    REQUIRE(run_config(write_config(dir, config), dir / "out") == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["result"]["final_defect"].get<double>() < 1e-9);
}

TEST_CASE("expansion check audit") {
    const auto dir = fresh_dir("expansion");
    auto config = base_config("expansion-check");
    config["params"] = {{"n", 8}};
    REQUIRE(run_config(write_config(dir, config), dir / "out") == 0);
    const auto audit = nlohmann::json::parse(slurp(dir / "out" / "audit.json"));
    CHECK(audit["identity_error"].get<double>() < 1e-10);
    CHECK(audit["atoms"].size() == 17);
    const std::string trace = slurp(dir / "out" / "rn_trace.csv");
    CHECK(trace.rfind("eps,re_value,im_value,ratio_re,ratio_im\n", 0) == 0);
}
