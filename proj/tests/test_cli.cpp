#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "aptwelfare/choice_data.hpp"
#include "aptwelfare/cli.hpp"
#include "support/datasets.hpp"

using namespace aptw;
using namespace aptw::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    json j() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("aptw_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name)) << text;
        return file(name);
    }
};

const TempDir& tmp() {
    static TempDir d;
    return d;
}

std::string example_csv() {
    static std::string path = [] {
        const auto p = tmp().file("k3.csv");
        save_csv(k3_dataset(), p);
        return p;
    }();
    return path;
}

std::string read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("check: exit codes and schema") {
    auto ok = run({"check", example_csv(), "--qrum"});
    CHECK(ok.code == cli::kExitOk);
    auto j = ok.j();
    CHECK(j["schema"] == "aptwelfare/1");
    CHECK(j["apt_rationalizable"] == true);
    CHECK(j["qrum"]["qrum_rationalizable"] == true);

    const auto bad = tmp().file("bad_e.csv");
    save_csv(with_cell(k3_dataset(), 0.0, 10.0, 0.5), bad);
    auto r = run({"check", bad});
    CHECK(r.code == cli::kExitVerdict);
    bool named = false;
    const auto rj = r.j();
    for (const auto& rep : rj["reports"])
        if (rep["axiom"] == "E" && rep["verdict"] == "fail") named = !rep["witnesses"].empty();
    CHECK(named);
}

TEST_CASE("check: input errors exit 2") {
    CHECK(run({"check", tmp().file("missing.csv")}).code == cli::kExitInput);
    const auto broken = tmp().write("broken.csv", "price,income,share\n0,1,1.5\n1,1,0\n");
    auto r = run({"check", broken});
    CHECK(r.code == cli::kExitInput);
    CHECK(r.err.find("row 2") != std::string::npos);
    CHECK(run({"check", example_csv(), "--no-such-flag"}).code == cli::kExitInput);
    CHECK(run({}).code == cli::kExitInput);
    CHECK(run({"frobnicate"}).code == cli::kExitInput);
}

TEST_CASE("check: income variance is a negative verdict") {
    const auto path = tmp().file("varied.csv");
    save_csv(with_cell(k3_dataset(0.01, {5.0, 10.0}), 1.0, 10.0, 0.6), path);
    auto r = run({"check", path, "--qrum"});
    CHECK(r.code == cli::kExitVerdict);
    CHECK(r.j()["qrum"]["candidate"] == false);
}

TEST_CASE("config overrides") {
    const auto cfg = tmp().write("cfg.json", R"({"jump_threshold": 0.5, "exact_grid": true})");
    auto r = run({"check", example_csv(), "--config", cfg});
    CHECK(r.code == 0);
    CHECK(r.j()["config"]["jump_threshold"] == 0.5);
    const auto typo = tmp().write("typo.json", R"({"jump_treshold": 0.5})");
    CHECK(run({"check", example_csv(), "--config", typo}).code == cli::kExitInput);
    CHECK(run({"check", example_csv(), "--eq-tol", "-1"}).code == cli::kExitInput);
}

TEST_CASE("rationalize") {
    auto r = run({"rationalize", example_csv()});
    CHECK(r.code == 0);
    auto j = r.j();
    CHECK(j["verified"] == true);
    CHECK(j["u1"] == "identity");
    auto q = run({"rationalize", example_csv(), "--qrum"});
    CHECK(q.code == 0);
    CHECK(q.j()["qrum"]["beta"] == 1);
}

TEST_CASE("welfare: combined output and cdf file") {
    const auto cdf = tmp().file("cdf.csv");
    auto r = run({"welfare", example_csv(), "--y", "10", "--p-old", "1", "--p-new", "2", "--model", "both", "--emit-cdf", cdf});
    CHECK(r.code == 0);
    auto j = r.j();
    CHECK(j["fosd"]["verdict"] == true);
    CHECK(j["apt"]["interval"]["lo"].get<double>() == doctest::Approx(2.0));
    CHECK(j["apt"]["interval"]["hi"].get<double>() == doctest::Approx(9.0));
    CHECK(j["rum"].contains("cdf_segments"));
    const auto text = read(cdf);
    CHECK(text.rfind("z,F_apt_lo,F_apt_hi,F_rum\n", 0) == 0);

    auto apt_only = run({"welfare", example_csv(), "--y", "10", "--p-old", "1", "--p-new", "2", "--model", "apt"});
    CHECK(apt_only.code == 0);
    CHECK_FALSE(apt_only.j().contains("rum"));
    CHECK(run({"welfare", example_csv(), "--y", "10", "--p-old", "2", "--p-new", "1"}).code == cli::kExitInput);
    CHECK(run({"welfare", example_csv(), "--y", "10", "--p-old", "1", "--p-new", "2", "--model", "logit"}).code ==
          cli::kExitInput);
}

TEST_CASE("simulate and oracle are deterministic") {
    const auto spec = tmp().write("pop.json", R"({"kind": "apt", "incomes": [10], "u0_knots": "linear",
        "u1_offset": 3, "g": {"uniform": [0, 3]}, "tail_mass": 0, "seed": 7})");
    const auto a = tmp().file("a.csv"), b = tmp().file("b.csv");
    auto r1 = run({"simulate", "--spec", spec, "--grid-step", "0.01", "--out", a});
    auto r2 = run({"simulate", "--spec", spec, "--grid-step", "0.01", "--out", b});
    CHECK(r1.code == 0);
    auto j1 = r1.j(), j2 = r2.j();
    j1.erase("out");
    j2.erase("out");
    CHECK(j1 == j2);
    CHECK(read(a) == read(b));
    auto back = load_csv(a);
    CHECK(back.q1(1.5, 10.0) == doctest::Approx(0.5));

    auto o1 = run({"oracle", "--spec", spec, "--y", "10", "--p-old", "1", "--p-new", "2", "--n", "20000"});
    auto o2 = run({"oracle", "--spec", spec, "--y", "10", "--p-old", "1", "--p-new", "2", "--n", "20000"});
    CHECK(o1.code == 0);
    CHECK(o1.out == o2.out);
    CHECK(o1.j()["seed"] == 7);
    auto o3 = run({"oracle", "--spec", spec, "--y", "10", "--p-old", "1", "--p-new", "2", "--n", "20000", "--seed", "8"});
    CHECK(o3.j()["seed"] == 8);

    const auto bad = tmp().write("badpop.json", R"({"kind": "apt", "incomes": [10], "g": {"uniform": [3, 0]}})");
    CHECK(run({"simulate", "--spec", bad, "--out", a}).code == cli::kExitInput);
}

TEST_CASE("example") {
    auto r = run({"example"});
    CHECK(r.code == 0);
    auto j = r.j();
    CHECK(j["all_ok"] == true);
    CHECK(j["identification"] == "partial");
    CHECK(run({"example", "--assume-full-attention"}).code == 0);
    CHECK(run({"example", "--grid-step", "0.5"}).code == 0);
    auto t = run({"example", "--table"});
    CHECK(t.code == 0);
    CHECK(t.out.find("FOSD verdict") != std::string::npos);
}
