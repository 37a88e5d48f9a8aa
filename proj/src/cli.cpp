#include "lossq/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "lossq/asymptotics.hpp"
#include "lossq/busy_period.hpp"
#include "lossq/redundancy.hpp"
#include "lossq/report.hpp"
#include "lossq/simulator.hpp"

namespace lossq {
namespace {

constexpr int kExactCapacityLimit = 20000;

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

std::string render(const Table& t, Format f) { return f == Format::csv ? to_csv(t) : to_json(t); }

SimConfig sim_config(const RunConfig& c) {
    SimConfig s;
    s.lambda = c.model.lambda;
    s.dist = c.model.service;
    s.nu = c.model.nu;
    s.buffer = c.model.buffer;
    s.p = c.model.p;
    s.zeta_mode = c.command.zeta_mode;
    s.n_busy_periods = c.command.n_busy_periods;
    s.event_cap = c.command.event_cap;
    s.replications = c.command.replications;
    s.seed = c.command.seed;
    s.threads = c.command.threads;
    return s;
}

RegimeOptions regime_options(const RunConfig& c) {
    RegimeOptions o;
    o.heavy_traffic_eps = c.command.heavy_traffic_eps;
    o.zero_c = c.command.zero_c;
    return o;
}

Execution run_analyze(const RunConfig& c) {
    const auto zeta = zeta_pmf(c.model.nu, c.model.buffer);
    const auto chars = mixture_characteristics(zeta, c.model.lambda, c.model.service, c.model.p);
    Table t{{"K_or_mix", "e_t", "e_p", "e_m", "e_r", "pi"}, {}};
    const Cell label = zeta.degenerate() ? Cell{std::int64_t{zeta.lower}} : Cell{std::string("mix")};
    t.add({label, chars.e_t, chars.e_p, chars.e_m, chars.e_r, loss_probability(chars)});
    return {ExitCode::ok, render(t, c.output.format), {}, {}};
}

Execution run_asymptote(const RunConfig& c) {
    const auto zeta = zeta_pmf(c.model.nu, c.model.buffer);
    const auto rep = classify(c.model.lambda, c.model.service, zeta, c.model.p, regime_options(c));
    std::optional<BusyPeriodCharacteristics> exact;
    if (zeta.upper() <= kExactCapacityLimit)
        exact = mixture_characteristics(zeta, c.model.lambda, c.model.service, c.model.p);

    Table t{{"regime", "epsilon", "C", "D", "phi", "quantity", "predicted", "exact", "delta"}, {}};
    std::string notes;
    auto row = [&](const std::string& q, double predicted, std::optional<double> ex,
                   const std::vector<std::string>& caveats) {
        std::optional<double> delta;
        if (ex) delta = *ex - predicted;
        t.add({std::string(to_string(rep.regime)), rep.epsilon, rep.C, rep.D, opt(rep.phi), q, predicted, opt(ex),
               opt(delta)});
        for (const auto& cv : caveats) notes += q + ": " + cv + "\n";
    };
    const auto ep = ep_asymptote(c.model.lambda, c.model.service, zeta);
    const auto er = er_asymptote(c.model.lambda, c.model.service, zeta);
    const auto pi = loss_asymptote(rep, c.model.p);
    row("e_p", ep.value, exact ? std::optional(exact->e_p) : std::nullopt, ep.caveats);
    row("e_r", er.value, exact ? std::optional(exact->e_r) : std::nullopt, er.caveats);
    row("pi", pi.value, exact ? std::optional(loss_probability(*exact)) : std::nullopt, pi.caveats);
    for (const auto& f : rep.flags) notes += f + "\n";
    notes += "pi rule: " + pi.rule + "\n";
    if (!exact) notes += "exact values skipped: zeta can exceed " + std::to_string(kExactCapacityLimit) + "\n";
    return {ExitCode::ok, render(t, c.output.format), {}, notes};
}

std::vector<Cell> estimate_cells(const SimEstimate& e) {
    return {e.e_t, e.e_p, e.e_m, e.e_r, e.pi_hat, e.se_t, e.se_p, e.se_m, e.se_r, e.se_pi};
}

const std::vector<std::string> kEstimateColumns = {"e_t",  "e_p",  "e_m",  "e_r",  "pi",
                                                   "se_t", "se_p", "se_m", "se_r", "se_pi"};

Execution run_simulate(const RunConfig& c) {
    const auto res = run(sim_config(c));
    Table t;
    t.columns = {"replication", "cycles"};
    t.columns.insert(t.columns.end(), kEstimateColumns.begin(), kEstimateColumns.end());
    for (std::size_t i = 0; i < res.replications.size(); ++i) {
        const auto& e = res.replications[i];
        std::vector<Cell> row{static_cast<std::int64_t>(i), e.n_cycles};
        const auto est = estimate_cells(e);
        row.insert(row.end(), est.begin(), est.end());
        t.add(std::move(row));
    }

    const auto& s = res.summary;
    std::vector<std::string> keys = {"seed", "replications", "zeta_mode", "cycles"};
    std::vector<Cell> vals = {std::to_string(c.command.seed), std::int64_t{c.command.replications},
                              std::string(to_string(c.command.zeta_mode)), s.n_cycles};
    keys.insert(keys.end(), kEstimateColumns.begin(), kEstimateColumns.end());
    const auto est = estimate_cells(s);
    vals.insert(vals.end(), est.begin(), est.end());
    for (const auto& [k, v] : std::vector<std::pair<std::string, std::int64_t>>{
             {"arrivals", s.arrivals},
             {"served", s.served},
             {"refused", s.refused},
             {"marked", s.marked},
             {"conservation_violations", s.conservation_violations}}) {
        keys.push_back(k);
        vals.emplace_back(v);
    }
    keys.push_back("mean_idle");
    vals.emplace_back(s.mean_idle);
    const std::string summary = to_json_object(keys, vals);

    Execution out;
    if (c.output.format == Format::csv) {
        out.document = to_csv(t);
        const std::string path = c.output.path == "-" ? "-" : c.output.path + ".summary.json";
        out.side_files.push_back({path, summary + "\n"});
    } else {
        out.document = "{\"replications\": " + to_json(t) + ", \"summary\": " + summary + "}\n";
    }
    return out;
}

Execution run_compare(const RunConfig& c) {
    const auto res = run(sim_config(c));
    const auto zeta = zeta_pmf(c.model.nu, c.model.buffer);
    const auto analytic = mixture_characteristics(zeta, c.model.lambda, c.model.service, c.model.p);
    const auto rep = compare(res.summary, analytic);
    Table t{{"quantity", "simulated", "se", "analytic", "z", "pass"}, {}};
    for (const auto& e : rep.entries)
        t.add({e.quantity, e.simulated, e.se, e.analytic, e.z, std::abs(e.z) <= kZThreshold});
    Execution out{rep.pass ? ExitCode::ok : ExitCode::comparison_fail, render(t, c.output.format), {}, {}};
    if (!rep.pass) out.message = "simulation and analytic values disagree beyond 3 standard errors";
    return out;
}

Execution run_redundancy(const RunConfig& c) {
    RedundancyScenario s;
    s.q = c.command.q;
    s.l = c.command.l;
    s.recover_threshold = c.command.recover_threshold;
    s.lambda = c.model.lambda;
    s.service = c.model.service;
    s.nu = c.model.nu;
    s.buffer = c.model.buffer;
    s.regime_options = regime_options(c);
    const auto table = sweep(s, c.command.k_range);
    Table t{{"k", "p_breve", "rho_breve", "regime", "pi_predicted", "pi_exact", "verdict"}, {}};
    for (const auto& r : table.rows)
        t.add({std::int64_t{r.k}, r.p_breve, r.rho_breve, std::string(to_string(r.regime)), r.pi_predicted,
               opt(r.pi_exact), std::string(to_string(r.verdict))});
    return {ExitCode::ok, render(t, c.output.format), {}, "argmin k = " + std::to_string(table.argmin_k)};
}

void write_file(const std::string& path, const std::string& content, std::ostream& console) {
    if (path == "-") {
        console << content;
        console.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open output file '" + path + "'");
    f << content;
    f.close();
    if (!f) throw UsageError("failed writing output file '" + path + "'");
}

}  // namespace

Execution execute(const RunConfig& config) {
    switch (config.command.name) {
        case Command::analyze: return run_analyze(config);
        case Command::asymptote: return run_asymptote(config);
        case Command::simulate: return run_simulate(config);
        case Command::compare: return run_compare(config);
        case Command::redundancy: return run_redundancy(config);
        case Command::echo: return {ExitCode::ok, emit_config(config), {}, {}};
    }
    throw UsageError("unknown command");
}

void write_outputs(const RunConfig& config, const Execution& execution) {
    write_file(config.output.path, execution.document, std::cout);
    for (const auto& a : execution.side_files) write_file(a.path, a.content, std::cerr);
}

}  // namespace lossq
