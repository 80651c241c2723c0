#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "commands.hpp"
#include "holeburn/csv.hpp"

namespace fs = std::filesystem;
using holeburn::cli::run_cli;
using doctest::Approx;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "holeburn");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("holeburn_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream(path) << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallConfig =
    "[integration]\n"
    "n_r = 12\n"
    "n_z = 12\n"
    "n_delta = 16\n"
    "rel_tol = 0\n";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"fit"}).code == 2);
    CHECK(run({"simulate", "--bogus"}).code == 2);
}

TEST_CASE("simulate") {
    TempDir d;
    write_file(d / "small.ini", kSmallConfig);
    const auto r = run({"simulate", "--config", d / "small.ini", "--t-end", "0"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto t = holeburn::read_csv(in);
    CHECK(t.rows() == 1);
    CHECK(t.header == std::vector<std::string>{"time_s", "model_signal", "scaled_counts_per_s"});

    const auto missing = run({"simulate", "--config", d / "nope.ini"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("nope.ini") != std::string::npos);

    write_file(d / "bad.ini", "[integration]\nn_rr = 3\n");
    CHECK(run({"simulate", "--config", d / "bad.ini"}).code == 2);
    write_file(d / "neg.ini", "[beam]\npower_w = -1\n");
    CHECK(run({"simulate", "--config", d / "neg.ini"}).code == 2);

    write_file(d / "cap.ini", "[integration]\nn_r = 8\nn_z = 8\nn_delta = 8\nrel_tol = 1e-9\nmax_refinements = 1\n");
    CHECK(run({"simulate", "--config", d / "cap.ini", "--t-end", "2"}).code == 3);
}

TEST_CASE("simulate report") {
    TempDir d;
    write_file(d / "small.ini", kSmallConfig);
    const auto r = run({"simulate", "--config", d / "small.ini", "--t-end", "5", "--out", d / "s.csv",
                        "--report", "-"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "ok");
    CHECK(j["result"]["points"] == 6);
    CHECK(j["config"]["integration"]["n_r"] == 12);
}

TEST_CASE("gen decay matches simulate and is reproducible") {
    TempDir d;
    write_file(d / "small.ini", kSmallConfig);
    REQUIRE(run({"simulate", "--config", d / "small.ini", "--t-end", "10", "--out", d / "sim.csv"}).code == 0);
    REQUIRE(run({"gen", "decay", "--config", d / "small.ini", "--t-end", "10", "--out", d / "gen.csv"}).code == 0);
    const auto a = holeburn::read_csv_file(d / "sim.csv");
    const auto b = holeburn::read_csv_file(d / "gen.csv");
    CHECK(a.columns[a.column("scaled_counts_per_s")] == b.columns[b.column("scaled_counts_per_s")]);

    const std::vector<std::string> noisy{"gen", "decay", "--config", d / "small.ini", "--t-end", "10",
                                         "--noise", "poisson", "--seed", "11"};
    auto n1 = noisy, n2 = noisy, n3 = noisy;
    n1.insert(n1.end(), {"--out", d / "n1.csv"});
    n2.insert(n2.end(), {"--out", d / "n2.csv"});
    n3[n3.size() - 1] = "12";
    n3.insert(n3.end(), {"--out", d / "n3.csv"});
    REQUIRE(run(n1).code == 0);
    REQUIRE(run(n2).code == 0);
    REQUIRE(run(n3).code == 0);
    CHECK(read_file(d / "n1.csv") == read_file(d / "n2.csv"));
    CHECK(read_file(d / "n1.csv") != read_file(d / "n3.csv"));
    CHECK(run({"gen", "decay", "--noise", "pink"}).code == 2);
}

TEST_CASE("seven powers and trap fit round trip") {
    TempDir d;
    write_file(d / "small.ini", kSmallConfig);
    const auto r = run({"gen", "decay", "--config", d / "small.ini", "--t-end", "40", "--dt", "2",
                        "--seven-powers", "--out-dir", d.path.string()});
    REQUIRE(r.code == 0);
    std::vector<std::string> files;
    for (const char* p : {"2", "4", "8", "13", "21", "29", "44"}) {
        files.push_back(d / (std::string("decay_") + p + "uW.csv"));
        CHECK(fs::exists(files.back()));
    }
    std::vector<std::string> args{"fit", "trap", "--config", d / "small.ini", "--out", d / "fit.json",
                                  files[1], files[3], files[5]};
    REQUIRE(run(args).code == 0);
    const auto j = nlohmann::json::parse(read_file(d / "fit.json"));
    CHECK(j["status"] == "ok");
    CHECK(j["result"]["gamma_trap_per_s"].get<double>() == Approx(7e4).epsilon(0.01));
    for (const auto& c : j["result"]["curves"]) CHECK(c["scale_a"].get<double>() == Approx(0.19).epsilon(0.01));

    write_file(d / "nopower.csv", "time_s,counts_per_s\n0,1\n1,1\n");
    CHECK(run({"fit", "trap", d / "nopower.csv"}).code == 2);
}

TEST_CASE("hole pipeline") {
    TempDir d;
    REQUIRE(run({"gen", "hole", "--points", "2000", "--fluor-offset", "40", "--power-offset", "3",
                 "--power-slope", "0.2", "--out", d / "scan.csv"}).code == 0);
    const auto r = run({"fit", "hole", d / "scan.csv", "--rms-range", "1000:1900", "--treated-out",
                        d / "treated.csv"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const double fwhm = j["result"]["fwhm_hz"].get<double>();
    CHECK(fwhm == Approx(6e6).epsilon(1e-4));
    CHECK(j["result"]["hom_linewidth_hz"].get<double>() == fwhm / 2);
    CHECK(j["result"]["center_hz"].get<double>() == Approx(-50e6).epsilon(1e-4));
    CHECK(j["input"]["aom_off"] == "0:50");
    CHECK(fs::exists(d / "treated.csv"));

    REQUIRE(run({"fit", "hole", d / "scan.csv", "--treated-out", d / "level.csv", "--level-above", "50e6"}).code == 0);
    const auto lv = holeburn::read_csv_file(d / "level.csv");
    const auto& lf = lv.columns[lv.column("freq_hz")];
    const auto& ls = lv.columns[lv.column("normalized_signal")];
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < lf.size(); ++i)
        if (lf[i] >= 50e6) {
            sum += ls[i];
            ++count;
        }
    CHECK(sum / count == Approx(1.0).epsilon(1e-9));

    const auto detect = run({"fit", "hole", d / "scan.csv", "--detect-aom-off"});
    REQUIRE(detect.code == 0);
    CHECK(nlohmann::json::parse(detect.out)["input"]["aom_off"] == "0:50");

    write_file(d / "broken.csv", "freq_hz,fluor_counts\n1,2,3\n");
    CHECK(run({"fit", "hole", d / "broken.csv"}).code == 2);

    write_file(d / "few.ini", "[fit]\nmax_iterations = 2\n");
    REQUIRE(run({"gen", "hole", "--points", "400", "--aom-off", "0:20", "--out", d / "s2.csv"}).code == 0);
    const auto failed = run({"fit", "hole", "--config", d / "few.ini", d / "s2.csv"});
    CHECK(failed.code == 4);
    CHECK(nlohmann::json::parse(failed.out)["status"] == "failed");
}

TEST_CASE("hole decay and linear fits") {
    TempDir d;
    REQUIRE(run({"gen", "holedecay", "--out", d / "hd.csv"}).code == 0);
    const auto e = run({"fit", "expdecay", d / "hd.csv"});
    REQUIRE(e.code == 0);
    CHECK(nlohmann::json::parse(e.out)["result"]["tau_s"].get<double>() == Approx(0.072).epsilon(1e-6));

    write_file(d / "line.csv", "x,y\n0,1\n1,3\n2,5\n3,7\n");
    const auto l = run({"fit", "linear", d / "line.csv"});
    REQUIRE(l.code == 0);
    const auto j = nlohmann::json::parse(l.out);
    CHECK(j["result"]["slope"].get<double>() == Approx(2.0));
    CHECK(j["result"]["intercept"].get<double>() == Approx(1.0));
    CHECK(run({"fit", "linear", d / "line.csv", "--confidence", "1.5"}).code == 2);
}

TEST_CASE("zeeman") {
    TempDir d;
    REQUIRE(run({"zeeman", "44.5e6", "19e6", "--out", d / "z.csv"}).code == 0);
    const auto t = holeburn::read_csv_file(d / "z.csv");
    REQUIRE(t.rows() == 2);
    CHECK(t.columns[t.column("b_sum_t")][0] == Approx(1e-3).epsilon(1e-9));
    CHECK(t.columns[t.column("b_ground_t")][1] == Approx(1e-3).epsilon(1e-9));

    const auto empty = run({"zeeman"});
    CHECK(empty.code == 0);
    CHECK(empty.out.rfind("delta_f_hz,", 0) == 0);
    CHECK(run({"zeeman", "-5"}).code == 2);
}

} // TEST_SUITE
