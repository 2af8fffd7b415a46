// End-to-end checks of the command-line tool: output formats, exit codes,
// determinism, and the bundled fixtures.

#include <catch2/catch.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

namespace {

struct CliRun {
    int exit_code;
    std::string output;  // stdout and stderr combined
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(RNSNET_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return CliRun{WEXITSTATUS(status), out};
}

const std::string fixtures = RNSNET_FIXTURES_DIR;

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli encode and decode") {
    CHECK(run_cli("encode --n 7 300").output == "(46, 42, 45, 43)\n");
    CHECK(run_cli("encode --n 7 300").exit_code == 0);
    CHECK(run_cli("decode --n 7 0 0 0 0").output == "0\n");
    CHECK(run_cli("decode --n 7 46 42 45 43").output == "300\n");

    const CliRun over = run_cli("encode --n 7 357886635");
    CHECK(over.exit_code != 0);
    CHECK(contains(over.output, "357886635"));

    const CliRun inconsistent = run_cli("decode --n 7 0 1 0 0");
    CHECK(inconsistent.exit_code != 0);
    CHECK(contains(inconsistent.output, "inconsistent"));

    const auto j = nlohmann::json::parse(run_cli("--json encode --n 7 300").output);
    CHECK(j.at("residues") == nlohmann::json({46, 42, 45, 43}));
}

TEST_CASE("cli selftest") {
    const CliRun exhaustive = run_cli("selftest --n 2 --exhaustive");
    CHECK(exhaustive.exit_code == 0);
    CHECK(contains(exhaustive.output, "ring-add: PASS (99225 cases)"));
    CHECK(contains(exhaustive.output, "parity: PASS (315 cases)"));
    CHECK(contains(exhaustive.output, "compare: PASS (99225 cases)"));
    CHECK(contains(exhaustive.output, "selftest: PASS"));

    const CliRun a = run_cli("selftest --n 7 --random 2000 --seed 1");
    const CliRun b = run_cli("selftest --n 7 --random 2000 --seed 1");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);  // byte-identical for identical invocations
    CHECK(run_cli("selftest --n 7 --random 2000 --seed 99").exit_code == 0);

    CHECK(run_cli("selftest --n 1").exit_code != 0);
    CHECK(run_cli("selftest --n 7 --exhaustive").exit_code != 0);
}

TEST_CASE("cli infer") {
    const std::string tiny = " --network " + fixtures + "/tiny_fc.json";
    const CliRun both = run_cli("infer" + tiny + " --input " + fixtures +
                                "/tiny_fc_input.json --mode both");
    CHECK(both.exit_code == 0);
    CHECK(contains(both.output, "MATCH"));
    CHECK_FALSE(contains(both.output, "MISMATCH"));

    const CliRun zero = run_cli("infer" + tiny + " --input " + fixtures +
                                "/tiny_fc_zero_input.json --mode rns");
    CHECK(zero.exit_code == 0);
    CHECK(zero.output == "class 0\n");

    const CliRun conv = run_cli("infer --network " + fixtures + "/small_conv.json --input " +
                                fixtures + "/small_conv_input.json --mode both");
    CHECK(conv.exit_code == 0);
    CHECK(contains(conv.output, "MATCH"));

    const CliRun overflow = run_cli("infer --network " + fixtures + "/overflow_net.json --input " +
                                    fixtures + "/overflow_input.json --mode rns");
    CHECK(overflow.exit_code != 0);
    CHECK(contains(overflow.output, "layer 0"));
    CHECK(contains(overflow.output, "overflow"));

    // the reference path has no wraparound hazard and still runs
    const CliRun overflow_int = run_cli("infer --network " + fixtures +
                                        "/overflow_net.json --input " + fixtures +
                                        "/overflow_input.json --mode int");
    CHECK(overflow_int.exit_code == 0);
    CHECK(overflow_int.output == "class 0\n");

    const CliRun conflict = run_cli("infer --n 2" + tiny + " --input " + fixtures +
                                    "/tiny_fc_input.json");
    CHECK(conflict.exit_code != 0);
    CHECK(contains(conflict.output, "conflicts"));
}

TEST_CASE("cli infer prints the tensor when the network has no argmax") {
    // a 1x2 weights-[2,3] bias-[1] layer: input [4, 5] -> [24]
    const std::string net_path = "/tmp/rnsnet_test_fc.json";
    const std::string input_path = "/tmp/rnsnet_test_fc_input.json";
    {
        std::FILE* f = std::fopen(net_path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs(R"({"n":7,"weight_bits":6,"activation_bits":6,"input_shape":[2],
                       "layers":[{"type":"fully_connected","out_features":1,"in_features":2,
                                  "weights":[2,3],"bias":[1]}]})",
                   f);
        std::fclose(f);
        f = std::fopen(input_path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs(R"({"shape":[2],"data":[4,5]})", f);
        std::fclose(f);
    }
    const CliRun run = run_cli("infer --network " + net_path + " --input " + input_path +
                               " --mode both");
    CHECK(run.exit_code == 0);
    CHECK(contains(run.output, "int: tensor [1] = [24]"));
    CHECK(contains(run.output, "rns: tensor [1] = [24]"));
    CHECK(contains(run.output, "MATCH"));
    std::remove(net_path.c_str());
    std::remove(input_path.c_str());
}

TEST_CASE("cli macs") {
    const CliRun tiny = run_cli("macs --network " + fixtures + "/tiny_fc.json");
    CHECK(tiny.exit_code == 0);
    CHECK(contains(tiny.output, "layer 0 fully_connected: 32\n"));
    CHECK(contains(tiny.output, "layer 2 fully_connected: 24\n"));
    CHECK(contains(tiny.output, "total: 56\n"));

    const auto j = nlohmann::json::parse(
        run_cli("--json macs --network " + fixtures + "/alexnet_shape.json").output);
    const double total = j.at("total").get<double>();
    CHECK(total == 744010272.0);
    CHECK(std::fabs(total - 720e6) <= 0.05 * 720e6);
}

TEST_CASE("cli energy") {
    const CliRun report = run_cli("energy --network " + fixtures + "/tiny_fc.json --table " +
                                  fixtures + "/energy_table2.json");
    CHECK(report.exit_code == 0);
    CHECK(contains(report.output, "break_even ≈ 0.988 (rns wins for X >= 1)"));
    CHECK(contains(report.output, "note: excludes memory-access energy"));
    CHECK(contains(report.output, "input conversion: 4 elements"));
    CHECK(contains(report.output, "argmax comparator tree: 2 compares"));

    const auto j = nlohmann::json::parse(
        run_cli("--json energy --network " + fixtures + "/tiny_fc.json").output);
    CHECK(j.at("break_even").get<double>() == Approx(0.988));
    CHECK(j.at("rns_wins_above").get<bool>());
    CHECK(j.at("total_rns_pj").get<double>() > 0.0);

    // identical invocations print identical bytes
    const CliRun again = run_cli("energy --network " + fixtures + "/tiny_fc.json --table " +
                                 fixtures + "/energy_table2.json");
    CHECK(report.output == again.output);
}
