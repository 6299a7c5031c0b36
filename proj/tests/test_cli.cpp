#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "modric/config.hpp"

using namespace modric;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string tmp = (fs::temp_directory_path() / "modric_cli_out.txt").string();
    std::string cmd = std::string(CLI_BIN) + " " + args + " > " + tmp + " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(tmp);
    return r;
}

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / "modric_cli_test";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("cli build writes an edge list") {
    fs::path out = temp_dir() / "t.edges";
    auto r = run_cli("build --modric -m 2 -n 3 -q 1 -x 3 -y 4 --out " + out.string());
    CHECK(r.exit_code == 0);
    std::string edges = read_file(out.string());
    CHECK(edges.find("host:0:0:0 as:0:0:4 S2 1\n") != std::string::npos);
    // reproducible byte-for-byte
    fs::path out2 = temp_dir() / "t2.edges";
    run_cli("build --modric -m 2 -n 3 -q 1 -x 3 -y 4 --out " + out2.string());
    CHECK(read_file(out.string()) == read_file(out2.string()));
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli("build --modric -m 2 -n 2 -x 2 -y 99").exit_code == 1);  // y > 4C/c
    CHECK(run_cli("build --no-such-flag").exit_code == 2);
    CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("build --modric -m 1 -n 1 -x 1 -y 1").exit_code == 0);
}

TEST_CASE("cli grid flags reach the mdcube builder") {
    auto r = run_cli("build --mdcube -m 2 -n 4 -r 4");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("built mdcube: 192 nodes") != std::string::npos);
    auto rc = run_cli("cost --mdcube -m 10 -n 10 -r 27 -z 4");
    CHECK(rc.out.find("mdcube,72900,7200,145800,18.180,1.471,19.651") != std::string::npos);
}

TEST_CASE("cli verify emits a passing json report") {
    fs::path json = temp_dir() / "verify.json";
    auto r = run_cli("verify --modric -m 3 -n 3 -q 2 -x 4 -y 8 --all-properties --json " +
                     json.string());
    CHECK(r.exit_code == 0);
    std::string body = read_file(json.string());
    CHECK(body.find("\"pass\": true") != std::string::npos);
    CHECK(body.find("diameter") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);
}

TEST_CASE("cli route prints a path") {
    auto r = run_cli("route --modric -m 2 -n 3 -q 1 -x 3 -y 4 --src 0,0,4,0 --dst 1,2,5,3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("host:0:0:0") != std::string::npos);
    CHECK(r.out.find("hops:") != std::string::npos);
    // dotted addresses resolve through the bit plan
    auto r2 = run_cli("route --modric -m 2 -n 3 -q 1 -x 3 -y 4 --src 10.16.0.0 "
                      "--dst 10.216.0.1 --scheme spr");
    CHECK(r2.exit_code == 0);
    CHECK(r2.out.find("host:1:2:9") != std::string::npos);
    // out-of-range endpoints are constraint failures, not crashes
    auto r3 = run_cli("route --modric -m 2 -n 3 -q 1 -x 3 -y 4 --src 10.0.16.0 --dst 10.216.0.1");
    CHECK(r3.exit_code == 1);
}

TEST_CASE("cli config file with flag overrides") {
    fs::path conf = temp_dir() / "net.conf";
    atomic_write_file(conf.string(),
                      "[modric]\nm=2\nn=2\nq=1\nx=2\ny=4\ncap_s1_gbps=10\ncap_s2_gbps=1\n");
    auto r = run_cli("build --config " + conf.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("built modric") != std::string::npos);
    // flag overrides the file value
    auto r2 = run_cli("build --config " + conf.string() + " -n 3 --validate");
    CHECK(r2.exit_code == 0);
    CHECK(r2.out.find("PASS connected") != std::string::npos);
}

TEST_CASE("cli simulate is deterministic") {
    fs::path d1 = temp_dir() / "sim1";
    fs::path d2 = temp_dir() / "sim2";
    auto r1 = run_cli("simulate --experiment 3 --repetitions 2 --seed 5 --out-dir " + d1.string());
    auto r2 = run_cli("simulate --experiment 3 --repetitions 2 --seed 5 --out-dir " + d2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(read_file((d1 / "exp3_results.csv").string()) ==
          read_file((d2 / "exp3_results.csv").string()));
    CHECK(read_file((d1 / "exp3_summary.json").string()) ==
          read_file((d2 / "exp3_summary.json").string()));
}

TEST_CASE("cli cost table modes") {
    auto r = run_cli("cost --table3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("fattree R=66") != std::string::npos);
    CHECK(r.out.find("36.508") != std::string::npos);
    CHECK(r.out.find("total M$: computed 36.508 vs printed 35.508") != std::string::npos);
    auto r5 = run_cli("cost --table5");
    CHECK(r5.exit_code == 0);
    CHECK(r5.out.find("15.280") != std::string::npos);
    // custom price book
    fs::path prices = temp_dir() / "prices.conf";
    atomic_write_file(prices.string(), "gbe_port=200\n");
    auto rc = run_cli("cost --fattree -R 4 --prices " + prices.string());
    CHECK(rc.exit_code == 0);
    CHECK(rc.out.find("fattree R=4,16,0,80,0.016") != std::string::npos);
}
