/**
 * @file rnsnet_cli.cpp
 * @brief Command-line front end: conversions, self-tests, inference runs,
 *        MAC accounting and energy reports.
 *
 * Output is line-oriented and stable so runs can be golden-file tested;
 * --json switches every command to machine-readable output. Exit code 0
 * means the command's semantic success condition held (values in range,
 * all suites passed, outputs matched, files parsed).
 *
 * @license Apache-2.0
 */

#include <cinttypes>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rnsnet/rnsnet.hpp"

namespace {

using nlohmann::json;

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::string format_pj(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string format_tensor(const rnsnet::IntTensor& t) {
    std::string s = "tensor [";
    for (std::size_t i = 0; i < t.shape.size(); ++i)
        s += (i ? ", " : "") + std::to_string(t.shape[i]);
    s += "] = [";
    for (std::size_t i = 0; i < t.data.size(); ++i)
        s += (i ? ", " : "") + std::to_string(t.data[i]);
    return s + "]";
}

json result_to_json(const rnsnet::InferenceResult& r) {
    if (std::holds_alternative<std::size_t>(r))
        return json{{"class", std::get<std::size_t>(r)}};
    const rnsnet::IntTensor& t = std::get<rnsnet::IntTensor>(r);
    return json{{"shape", t.shape}, {"data", t.data}};
}

void print_result(const rnsnet::InferenceResult& r, const std::string& prefix) {
    if (std::holds_alternative<std::size_t>(r))
        std::printf("%sclass %zu\n", prefix.c_str(), std::get<std::size_t>(r));
    else
        std::printf("%s%s\n", prefix.c_str(), format_tensor(std::get<rnsnet::IntTensor>(r)).c_str());
}

struct GlobalOpts {
    unsigned n = 7;
    bool json_out = false;
    std::uint64_t seed = 1;
};

int cmd_encode(const GlobalOpts& g, std::uint64_t value) {
    const rnsnet::ModuliSet ms = rnsnet::make_moduli_set(g.n);
    const rnsnet::RnsInt r = rnsnet::encode(value, ms);
    if (g.json_out)
        std::printf("%s\n", json{{"n", g.n}, {"value", value},
                                 {"residues", {r.r1, r.r1s, r.r2, r.r2s}}}
                                .dump()
                                .c_str());
    else
        std::printf("(%" PRIu64 ", %" PRIu64 ", %" PRIu64 ", %" PRIu64 ")\n", r.r1, r.r1s, r.r2,
                    r.r2s);
    return 0;
}

int cmd_decode(const GlobalOpts& g, const std::vector<std::uint64_t>& residues) {
    const rnsnet::ModuliSet ms = rnsnet::make_moduli_set(g.n);
    const rnsnet::RnsInt r{residues[0], residues[1], residues[2], residues[3]};
    const std::uint64_t value = rnsnet::decode(r, ms);
    if (g.json_out)
        std::printf("%s\n", json{{"n", g.n}, {"value", value}}.dump().c_str());
    else
        std::printf("%" PRIu64 "\n", value);
    return 0;
}

int cmd_selftest(const GlobalOpts& g, bool exhaustive, std::uint64_t random_count) {
    rnsnet::SelftestConfig cfg;
    cfg.n = g.n;
    cfg.exhaustive = exhaustive;
    cfg.random_count = random_count;
    cfg.seed = g.seed;
    const std::vector<rnsnet::SuiteResult> results = rnsnet::run_selftests(cfg);

    bool all_pass = true;
    json out = json::array();
    for (const rnsnet::SuiteResult& suite : results) {
        all_pass = all_pass && suite.pass;
        if (g.json_out) {
            out.push_back(json{{"suite", suite.name},
                               {"pass", suite.pass},
                               {"cases", suite.cases},
                               {"counterexample", suite.first_failure}});
        } else if (suite.pass) {
            std::printf("%s: PASS (%" PRIu64 " cases)\n", suite.name.c_str(), suite.cases);
        } else {
            std::printf("%s: FAIL (%" PRIu64 " cases): %s\n", suite.name.c_str(), suite.cases,
                        suite.first_failure.c_str());
        }
    }
    if (g.json_out)
        std::printf("%s\n", json{{"suites", out}, {"pass", all_pass}}.dump().c_str());
    else
        std::printf("selftest: %s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : 1;
}

int cmd_infer(const GlobalOpts& g, bool n_given, const std::string& network_path,
              const std::string& input_path, const std::string& mode) {
    const rnsnet::NetworkSpec net = rnsnet::load_network(network_path);
    if (n_given && g.n != net.n)
        throw std::invalid_argument("--n " + std::to_string(g.n) +
                                    " conflicts with the network file's n = " + std::to_string(net.n));
    const rnsnet::ModuliSet ms = rnsnet::make_moduli_set(net.n);
    const rnsnet::IntTensor input = rnsnet::load_tensor(input_path);

    if (mode == "int") {
        const rnsnet::InferenceResult r = rnsnet::infer_int(net, input);
        if (g.json_out)
            std::printf("%s\n", json{{"mode", "int"}, {"result", result_to_json(r)}}.dump().c_str());
        else
            print_result(r, "");
        return 0;
    }
    if (mode == "rns") {
        const rnsnet::InferenceResult r = rnsnet::infer_rns(net, input, ms);
        if (g.json_out)
            std::printf("%s\n", json{{"mode", "rns"}, {"result", result_to_json(r)}}.dump().c_str());
        else
            print_result(r, "");
        return 0;
    }

    const rnsnet::InferenceResult ri = rnsnet::infer_int(net, input);
    const rnsnet::InferenceResult rr = rnsnet::infer_rns(net, input, ms);
    const bool match = ri == rr;
    if (g.json_out) {
        std::printf("%s\n", json{{"mode", "both"},
                                 {"int", result_to_json(ri)},
                                 {"rns", result_to_json(rr)},
                                 {"match", match}}
                                .dump()
                                .c_str());
    } else {
        print_result(ri, "int: ");
        print_result(rr, "rns: ");
        std::printf("%s\n", match ? "MATCH" : "MISMATCH");
    }
    return match ? 0 : 1;
}

int cmd_macs(const GlobalOpts& g, const std::string& network_path) {
    const rnsnet::NetworkSpec net = rnsnet::load_network(network_path);
    const std::vector<std::uint64_t> per_layer = rnsnet::per_layer_macs(net);
    std::uint64_t total = 0;
    json rows = json::array();
    for (std::size_t i = 0; i < per_layer.size(); ++i) {
        total += per_layer[i];
        const char* kind = rnsnet::layer_kind(net.layers[i]);
        if (g.json_out)
            rows.push_back(json{{"layer", i}, {"kind", kind}, {"macs", per_layer[i]}});
        else
            std::printf("layer %zu %s: %" PRIu64 "\n", i, kind, per_layer[i]);
    }
    if (g.json_out)
        std::printf("%s\n", json{{"layers", rows}, {"total", total}}.dump().c_str());
    else
        std::printf("total: %" PRIu64 "\n", total);
    return 0;
}

int cmd_energy(const GlobalOpts& g, const std::string& network_path, const std::string& table_path) {
    const rnsnet::NetworkSpec net = rnsnet::load_network(network_path);
    const rnsnet::EnergyTable table =
        table_path.empty() ? rnsnet::EnergyTable::defaults() : rnsnet::load_energy_table(table_path);
    const rnsnet::EnergyReport report = rnsnet::network_energy_report(net, table);

    if (g.json_out) {
        json rows = json::array();
        for (const rnsnet::EnergyReportRow& row : report.rows)
            rows.push_back(json{{"layer", row.layer_index},
                                {"kind", row.kind},
                                {"macs", row.cost.mac_count},
                                {"relus", row.cost.relu_count},
                                {"rns_pj", round3(row.cost.energy_rns)},
                                {"conventional_pj", round3(row.cost.energy_conventional)}});
        std::printf("%s\n", json{{"layers", rows},
                                 {"input_elements", report.input_elements},
                                 {"conversion_pj", round3(report.conversion_pj)},
                                 {"compare_ops", report.compare_ops},
                                 {"compare_tree_pj", round3(report.compare_tree_pj)},
                                 {"total_rns_pj", round3(report.total_rns)},
                                 {"total_conventional_pj", round3(report.total_conventional)},
                                 {"break_even", round3(report.break_even_point.ratio)},
                                 {"rns_wins_above", report.break_even_point.rns_wins_above},
                                 {"caveat", "excludes memory-access energy"}}
                                .dump()
                                .c_str());
        return 0;
    }

    std::printf("energy report (pJ)\n");
    for (const rnsnet::EnergyReportRow& row : report.rows)
        std::printf("layer %zu %s: macs=%" PRIu64 " relus=%" PRIu64 " rns=%s conventional=%s\n",
                    row.layer_index, row.kind.c_str(), row.cost.mac_count, row.cost.relu_count,
                    format_pj(row.cost.energy_rns).c_str(),
                    format_pj(row.cost.energy_conventional).c_str());
    std::printf("input conversion: %" PRIu64 " elements, %s\n", report.input_elements,
                format_pj(report.conversion_pj).c_str());
    if (report.compare_ops > 0)
        std::printf("argmax comparator tree: %" PRIu64 " compares, %s\n", report.compare_ops,
                    format_pj(report.compare_tree_pj).c_str());
    std::printf("total rns: %s\n", format_pj(report.total_rns).c_str());
    std::printf("total conventional: %s\n", format_pj(report.total_conventional).c_str());
    if (report.total_conventional > 0.0)
        std::printf("ratio rns/conventional: %s\n",
                    format_pj(report.total_rns / report.total_conventional).c_str());
    std::printf("break_even ≈ %s (rns wins for X %s %" PRId64 ")\n",
                format_pj(report.break_even_point.ratio).c_str(),
                report.break_even_point.rns_wins_above ? ">=" : "<",
                static_cast<std::int64_t>(std::ceil(report.break_even_point.ratio)));
    std::printf("note: excludes memory-access energy\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residue number system arithmetic and integer network inference"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    GlobalOpts g;
    CLI::Option* n_opt = app.add_option("--n", g.n, "Moduli parameter n (moduli 2^n+-1, 2^(n+1)+-1)")
                             ->capture_default_str();
    app.add_flag("--json", g.json_out, "Machine-readable JSON output");
    app.add_option("--seed", g.seed, "Seed for randomized suites")->capture_default_str();

    std::uint64_t encode_value = 0;
    CLI::App* enc = app.add_subcommand("encode", "Convert an integer to its residue tuple");
    enc->add_option("value", encode_value, "Value in [0, M)")->required();

    std::vector<std::uint64_t> residues;
    CLI::App* dec = app.add_subcommand("decode", "Recover the integer from a residue tuple");
    dec->add_option("residues", residues, "The four residues (r1 r1s r2 r2s)")
        ->expected(4)
        ->required();

    bool exhaustive = false;
    std::uint64_t random_count = 100000;
    CLI::App* st = app.add_subcommand("selftest", "Run the cross-module invariant suites");
    st->add_flag("--exhaustive", exhaustive, "Sweep the full domain (n <= 4 only; n=4 takes minutes)");
    st->add_option("--random", random_count, "Random cases per suite")->capture_default_str();

    std::string network_path, input_path, table_path, mode = "both";
    CLI::App* inf = app.add_subcommand("infer", "Evaluate a network on an input tensor");
    inf->add_option("--network", network_path, "Network JSON file")->required();
    inf->add_option("--input", input_path, "Input tensor JSON file")->required();
    inf->add_option("--mode", mode, "rns, int or both")
        ->check(CLI::IsMember({"rns", "int", "both"}))
        ->capture_default_str();

    CLI::App* macs = app.add_subcommand("macs", "Count multiply-accumulates per layer");
    macs->add_option("--network", network_path, "Network JSON file")->required();

    CLI::App* energy = app.add_subcommand("energy", "Per-layer energy report and break-even point");
    energy->add_option("--network", network_path, "Network JSON file")->required();
    energy->add_option("--table", table_path, "Energy table JSON file (defaults built in)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed()) return cmd_encode(g, encode_value);
        if (dec->parsed()) return cmd_decode(g, residues);
        if (st->parsed()) return cmd_selftest(g, exhaustive, random_count);
        if (inf->parsed()) return cmd_infer(g, n_opt->count() > 0, network_path, input_path, mode);
        if (macs->parsed()) return cmd_macs(g, network_path);
        if (energy->parsed()) return cmd_energy(g, network_path, table_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
