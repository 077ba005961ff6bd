#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "smoothval/io.hpp"

using namespace smoothval;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const char* cli = std::getenv("SMOOTHVAL_CLI");
    if (!cli) return {};
    std::string cmd = std::string(cli) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WEXITSTATUS(status);
    return r;
}

bool have_cli() { return std::getenv("SMOOTHVAL_CLI") != nullptr; }

}  // namespace

TEST_CASE("report serialization round trips", "[cli]") {
    SmoothReport rep;
    rep.poly = "t^2+1";
    rep.x = 1000;
    rep.filter = "all";
    rep.rows.push_back({0.3, 123.456, 789.0, 0.0, 0.1234567890123456789, 0.789,
                        "delta"});
    json j = smooth_report_json(rep);
    json back = json::parse(j.dump());
    REQUIRE(back["rows"][0]["ratio"].get<double>() == rep.rows[0].ratio);
    REQUIRE(back["rows"][0]["baseline"].get<double>() == rep.rows[0].baseline);

    // CSV: 17 significant digits reparse losslessly
    std::string csv = smooth_report_csv(rep);
    double parsed = 0;
    std::size_t pos = csv.find('\n') + 1;
    for (int col = 0; col < 5; ++col) pos = csv.find(',', pos) + 1;
    parsed = std::stod(csv.substr(pos));
    REQUIRE(parsed == rep.rows[0].ratio);

    REQUIRE(rational_to_string(mpq_class(96, 65)) == "96/65");
    REQUIRE(rational_from_string("96/65") == mpq_class(96, 65));
    REQUIRE(rational_to_string(mpq_class(7)) == "7");
}

TEST_CASE("cli smoke tests", "[cli]") {
    if (!have_cli()) {
        WARN("SMOOTHVAL_CLI not set; skipping CLI subprocess tests");
        return;
    }
    auto r = run_cli("smooth-count --poly \"t^2+1\" --x 20 --y 10");
    REQUIRE(r.code == 0);
    REQUIRE(json::parse(r.out)["count"] == 4);

    auto r2 = run_cli("rho --u 1");
    REQUIRE(r2.code == 0);
    REQUIRE(json::parse(r2.out)["rho"] == 1.0);

    auto r3 = run_cli("sigma --poly \"t^2+1\" --h 65");
    REQUIRE(r3.code == 0);
    REQUIRE(json::parse(r3.out)["sigma"] == 4);
}

TEST_CASE("cli exit codes", "[cli]") {
    if (!have_cli()) return;
    REQUIRE(run_cli("no-such-subcommand").code == 3);
    REQUIRE(run_cli("rho").code == 3);                        // missing --u
    REQUIRE(run_cli("rho --u -1").code == 2);                 // domain error
    REQUIRE(run_cli("sigma --poly \"t^2 -\" --h 5").code == 3);  // parse error
    REQUIRE(run_cli("sigma --poly \"t^2+t\" --h 4").code == 2);  // vanishes mod 2
}

TEST_CASE("cli determinism across thread counts", "[cli]") {
    if (!have_cli()) return;
    std::string base =
        "smooth-count --poly \"t^2+1\" --x 5000 --y 100 --filter lambda --threads ";
    auto r1 = run_cli(base + "1");
    auto r4 = run_cli(base + "4");
    auto r8 = run_cli(base + "8");
    REQUIRE(r1.code == 0);
    REQUIRE(r1.out == r4.out);
    REQUIRE(r1.out == r8.out);

    std::string bv = "bv-sum --x 2000 --Q 40 --format csv --threads ";
    auto b1 = run_cli(bv + "1");
    auto b4 = run_cli(bv + "4");
    REQUIRE(b1.code == 0);
    REQUIRE(b1.out == b4.out);
}

TEST_CASE("cli config file with flag overrides", "[cli]") {
    if (!have_cli()) return;
    std::string path = "/tmp/smoothval_test_config.json";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs("{\"poly\": \"t^2+1\", \"x\": 20, \"y\": 10}\n", f);
        std::fclose(f);
    }
    auto r = run_cli("smooth-count --config " + path);
    REQUIRE(r.code == 0);
    REQUIRE(json::parse(r.out)["count"] == 4);
    // flag overrides the config value
    auto r2 = run_cli("smooth-count --config " + path + " --y 2");
    REQUIRE(r2.code == 0);
    REQUIRE(json::parse(r2.out)["count"] == 1);  // only f(1) = 2 is 2-smooth
    std::remove(path.c_str());
}
