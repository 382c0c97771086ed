#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
    const char* env = std::getenv("SPINSTEIN_BIN");
    REQUIRE(env != nullptr);
    return env;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) r.output.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("spinstein_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("macrostates subcommand succeeds and writes its table") {
    const auto dir = fresh_dir("macro");
    const auto r = run("--out-dir " + dir.string() + " macrostates --q 3 --beta 1.6 --out m.csv");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "m.csv"));
    REQUIRE(fs::exists(dir / "macrostates.manifest.json"));
    const std::string csv = slurp(dir / "m.csv");
    REQUIRE(csv.rfind("index,x_1", 0) == 0);
    REQUIRE(csv.find("theta") != std::string::npos);
    // locale-independent decimal point
    REQUIRE(csv.find('.') != std::string::npos);
    REQUIRE(csv.find("0,") != std::string::npos);
}

TEST_CASE("invalid arguments exit with the usage code") {
    REQUIRE(run("simulate --q 2 --n 10 --beta 1.0 --steps 10").exit_code == 2);
    REQUIRE(run("nonsense-subcommand").exit_code == 2);
    REQUIRE(run("exact tmix --q 3 --n 10 --beta -1").exit_code == 2);
}

TEST_CASE("resource guards exit with the resource code") {
    REQUIRE(run("exact tmix --q 3 --n 5000 --beta 1.0").exit_code == 3);
}

TEST_CASE("unwritable output directory exits with the io code") {
    const auto r = run("--out-dir /proc/definitely/not/writable macrostates --q 3 --beta 1.0 "
                       "--out m.csv");
    REQUIRE(r.exit_code == 4);
}

TEST_CASE("identical seeds give identical digests") {
    const auto d1 = fresh_dir("seed1");
    const auto d2 = fresh_dir("seed2");
    const std::string args =
        " simulate --model cwp --q 3 --n 60 --beta 1.6 --steps 5000 --seed 99 "
        "--restrict ordered:1:0.05 --out run.csv";
    REQUIRE(run("--out-dir " + d1.string() + args).exit_code == 0);
    REQUIRE(run("--out-dir " + d2.string() + args).exit_code == 0);
    REQUIRE(slurp(d1 / "run.csv") == slurp(d2 / "run.csv"));
    const auto m1 = nlohmann::json::parse(slurp(d1 / "simulate.manifest.json"));
    const auto m2 = nlohmann::json::parse(slurp(d2 / "simulate.manifest.json"));
    REQUIRE(m1.at("outputs") == m2.at("outputs"));
    REQUIRE(m1.at("seed") == 99);
}

TEST_CASE("different seeds change the digest") {
    const auto d1 = fresh_dir("seedA");
    const auto d2 = fresh_dir("seedB");
    const std::string base =
        " simulate --model cwp --q 3 --n 60 --beta 1.6 --steps 5000 --out run.csv --seed ";
    REQUIRE(run("--out-dir " + d1.string() + base + "1").exit_code == 0);
    REQUIRE(run("--out-dir " + d2.string() + base + "2").exit_code == 0);
    REQUIRE(slurp(d1 / "run.csv") != slurp(d2 / "run.csv"));
}

TEST_CASE("replay reproduces a recorded run byte for byte") {
    const auto d1 = fresh_dir("orig");
    const auto d2 = fresh_dir("replayed");
    const auto r1 = run("--out-dir " + d1.string() +
                        " couple --q 3 --n 60 --beta 1.6 --x ordered:1 --r 0.05 --replicas 5 "
                        "--seed 7 --out couple.csv");
    INFO(r1.output);
    REQUIRE(r1.exit_code == 0);
    const auto r2 = run("replay " + (d1 / "couple.manifest.json").string() + " --out-dir " +
                        d2.string());
    INFO(r2.output);
    REQUIRE(r2.exit_code == 0);
    REQUIRE(slurp(d1 / "couple.csv") == slurp(d2 / "couple.csv"));
}

TEST_CASE("exact subcommands produce well-formed tables") {
    const auto dir = fresh_dir("exact");
    const auto r = run("--out-dir " + dir.string() +
                       " exact tmix --q 3 --n 20 --beta 1.0 --epsilon 0.25 --out tv.csv");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "tv.csv");
    REQUIRE(csv.rfind("t,worst_tv,tmix", 0) == 0);
    // every subsequent line has exactly two commas
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        REQUIRE(std::count(line.begin(), line.end(), ',') == 2);
        ++rows;
    }
    REQUIRE(rows >= 2);
}

TEST_CASE("bench theta-trend emits one row per beta") {
    const auto dir = fresh_dir("bench");
    const auto r = run("--out-dir " + dir.string() +
                       " bench theta-trend --q 3 --beta-list 1.5,2.0,3.0 --x ordered:1 "
                       "--out theta.csv");
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "theta.csv");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
}
