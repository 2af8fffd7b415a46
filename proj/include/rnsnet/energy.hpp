/**
 * @file energy.hpp
 * @brief Block-level energy accounting and the RNS break-even analysis.
 *
 * Energies derive from synthesized power/frequency pairs, one operation
 * per cycle: E = P/f. The built-in table carries the LP65nm synthesis
 * numbers for each block; a JSON table file can override any subset.
 * The conventional 32-bit ReLU block is not part of that data and
 * defaults to 0 pJ (a sign-bit multiplex), configurable like the rest.
 *
 * The whole model deliberately excludes memory-access energy; reports
 * print that caveat.
 *
 * @license Apache-2.0
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rnsnet/inference.hpp"
#include "rnsnet/network.hpp"

namespace rnsnet {

/// Energy per operation in picojoules from milliwatts and megahertz.
inline double energy_per_op(double power_mw, double freq_mhz) {
    if (!(power_mw > 0.0) || !(freq_mhz > 0.0))
        throw std::invalid_argument("energy_per_op: power and frequency must be positive");
    return power_mw / freq_mhz * 1000.0;
}

struct BlockEnergy {
    std::optional<double> power_mw;
    std::optional<double> freq_mhz;
    double energy_pj{};
};

/// Per-block energies, keyed by block name.
struct EnergyTable {
    std::map<std::string, BlockEnergy> blocks;

    double energy(const std::string& block) const {
        auto it = blocks.find(block);
        if (it == blocks.end())
            throw std::runtime_error("energy table: missing block \"" + block + "\"");
        return it->second.energy_pj;
    }

    static const std::vector<std::string>& block_names() {
        static const std::vector<std::string> names = {
            "Adder32", "AdderRNS", "Multiplier32", "MultiplierRNS",
            "ConvertToRNS", "ReLU-RNS", "CompareRNS", "ReLU32"};
        return names;
    }

    /// Built-in synthesis results (LP65nm power/frequency per block).
    static EnergyTable defaults() {
        EnergyTable t;
        auto put = [&t](const char* name, double p, double f) {
            t.blocks[name] = BlockEnergy{p, f, energy_per_op(p, f)};
        };
        put("Adder32", 1.05, 625.0);
        put("AdderRNS", 1.18, 625.0);
        put("Multiplier32", 3.04, 250.0);
        put("MultiplierRNS", 1.56, 250.0);
        put("ConvertToRNS", 2.6, 250.0);
        put("ReLU-RNS", 0.88, 156.0);
        put("CompareRNS", 1.67, 156.0);
        t.blocks["ReLU32"] = BlockEnergy{std::nullopt, std::nullopt, 0.0};
        return t;
    }
};

/// Parses a table file: { "Block": {"power_mw": p, "freq_mhz": f}, ... }.
/// Blocks absent from the file keep their built-in defaults.
inline EnergyTable energy_table_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("energy table: expected a JSON object");
    EnergyTable table = EnergyTable::defaults();
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const std::string& name : EnergyTable::block_names())
            if (name == it.key()) known = true;
        if (!known)
            throw std::invalid_argument("energy table: unknown block \"" + it.key() + "\"");
        const nlohmann::json& entry = it.value();
        if (!entry.is_object() || !entry.contains("power_mw") || !entry.contains("freq_mhz"))
            throw std::invalid_argument("energy table: block \"" + it.key() +
                                        "\" needs power_mw and freq_mhz");
        detail::reject_unknown_keys(entry, {"power_mw", "freq_mhz"}, "energy table " + it.key());
        const double p = entry.at("power_mw").get<double>();
        const double f = entry.at("freq_mhz").get<double>();
        table.blocks[it.key()] = BlockEnergy{p, f, energy_per_op(p, f)};
    }
    return table;
}

inline EnergyTable load_energy_table(const std::string& path) {
    return energy_table_from_json(detail::parse_file(path));
}

/// Energy of one layer's worth of MACs and ReLUs on both systems:
///   rns          = relus*E(ReLU-RNS) + macs*(E(MultiplierRNS)+E(AdderRNS))
///   conventional = relus*E(ReLU32)   + macs*(E(Multiplier32)+E(Adder32))
struct LayerCost {
    std::uint64_t mac_count{};
    std::uint64_t relu_count{};
    double energy_rns{};
    double energy_conventional{};
};

inline LayerCost layer_cost(std::uint64_t mac_count, std::uint64_t relu_count,
                            const EnergyTable& table) {
    LayerCost cost;
    cost.mac_count = mac_count;
    cost.relu_count = relu_count;
    const double macs = static_cast<double>(mac_count);
    const double relus = static_cast<double>(relu_count);
    cost.energy_rns =
        relus * table.energy("ReLU-RNS") + macs * (table.energy("MultiplierRNS") + table.energy("AdderRNS"));
    cost.energy_conventional =
        relus * table.energy("ReLU32") + macs * (table.energy("Multiplier32") + table.energy("Adder32"));
    return cost;
}

/// Break-even layer width: RNS and conventional energy cross at
/// X = (E_ReLU - E_RNSReLU) / ((E_RNSMult + E_RNSAdd) - (E_Mult + E_Add)).
struct BreakEven {
    double ratio{};
    /// True when the RNS MAC is the cheaper one, so RNS wins for every
    /// layer width X >= ceil(ratio); false flips the direction.
    bool rns_wins_above{};
};

inline BreakEven break_even(const EnergyTable& table) {
    const double numerator = table.energy("ReLU32") - table.energy("ReLU-RNS");
    const double denominator = (table.energy("MultiplierRNS") + table.energy("AdderRNS")) -
                               (table.energy("Multiplier32") + table.energy("Adder32"));
    if (std::fabs(denominator) < 1e-12)
        throw std::domain_error("break_even: RNS and conventional MAC energies are equal, "
                                "the model is degenerate");
    return BreakEven{numerator / denominator, denominator < 0.0};
}

struct EnergyReportRow {
    std::size_t layer_index{};
    std::string kind;
    LayerCost cost;
};

struct EnergyReport {
    std::vector<EnergyReportRow> rows;
    std::uint64_t input_elements{};
    double conversion_pj{};     ///< charged once per network input element
    std::uint64_t compare_ops{};
    double compare_tree_pj{};   ///< (outputs-1) comparators when the net ends in ArgMax
    double total_rns{};
    double total_conventional{};
    BreakEven break_even_point{};
};

/**
 * @brief Full-network energy accounting.
 *
 * Sums per-layer MAC/ReLU costs, charges input conversion on the RNS side
 * (weights are assumed converted offline) and, when the network ends with
 * ArgMax, the comparator tree over the final outputs, also RNS-only.
 */
inline EnergyReport network_energy_report(const NetworkSpec& net, const EnergyTable& table) {
    EnergyReport report;
    std::vector<std::size_t> shape = net.input_shape;
    report.input_elements = shape_elems(shape);
    report.conversion_pj = static_cast<double>(report.input_elements) * table.energy("ConvertToRNS");

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        std::uint64_t macs = count_macs(layer, shape, i);
        std::uint64_t relus = 0;
        if (std::holds_alternative<ReLU>(layer)) relus = shape_elems(shape);
        if (std::holds_alternative<ArgMax>(layer)) {
            report.compare_ops = shape_elems(shape) - 1;
            report.compare_tree_pj =
                static_cast<double>(report.compare_ops) * table.energy("CompareRNS");
        }
        report.rows.push_back(EnergyReportRow{i, layer_kind(layer), layer_cost(macs, relus, table)});
        shape = layer_output_shape(layer, shape, i);
    }

    report.total_rns = report.conversion_pj + report.compare_tree_pj;
    report.total_conventional = 0.0;
    for (const EnergyReportRow& row : report.rows) {
        report.total_rns += row.cost.energy_rns;
        report.total_conventional += row.cost.energy_conventional;
    }
    report.break_even_point = break_even(table);
    return report;
}

}  // namespace rnsnet
