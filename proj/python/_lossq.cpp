#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "lossq/asymptotics.hpp"
#include "lossq/busy_period.hpp"
#include "lossq/cli.hpp"
#include "lossq/config.hpp"
#include "lossq/error.hpp"
#include "lossq/packetization.hpp"
#include "lossq/redundancy.hpp"
#include "lossq/service.hpp"
#include "lossq/simulator.hpp"
#include "lossq/tauberian.hpp"

namespace py = pybind11;
using namespace lossq;

namespace {

py::dict estimate_dict(const SimEstimate& e) {
    py::dict d;
    d["e_t"] = e.e_t;
    d["e_p"] = e.e_p;
    d["e_m"] = e.e_m;
    d["e_r"] = e.e_r;
    d["pi"] = e.pi_hat;
    d["se_t"] = e.se_t;
    d["se_p"] = e.se_p;
    d["se_m"] = e.se_m;
    d["se_r"] = e.se_r;
    d["se_pi"] = e.se_pi;
    d["cycles"] = e.n_cycles;
    d["arrivals"] = e.arrivals;
    d["served"] = e.served;
    d["refused"] = e.refused;
    d["marked"] = e.marked;
    d["conservation_violations"] = e.conservation_violations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_lossq, m) {
    m.doc() = "Loss characteristics of finite-buffer queues carrying packetized messages";

    // Translators run newest first, so the base class goes in before its subclasses.
    static py::exception<Error> base(m, "LossqError", PyExc_RuntimeError);
    static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
    static py::exception<RegimeError> regime(m, "RegimeError", base.ptr());
    static py::exception<ComparisonError> comparison(m, "ComparisonError", base.ptr());
    static py::exception<RunawayError> runaway(m, "RunawayError", base.ptr());
    static py::exception<UsageError> usage(m, "UsageError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const UsageError& e) {
            py::set_error(usage, e.what());
        } catch (const RunawayError& e) {
            py::set_error(runaway, e.what());
        } catch (const ComparisonError& e) {
            py::set_error(comparison, e.what());
        } catch (const RegimeError& e) {
            py::set_error(regime, e.what());
        } catch (const ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<ServiceDistribution>(m, "Service")
        .def(py::init([](const std::string& text) { return parse_service(text); }), py::arg("text"))
        .def_static("deterministic", &ServiceDistribution::deterministic, py::arg("mean"))
        .def_static("exponential", &ServiceDistribution::exponential, py::arg("mean"))
        .def_static("erlang", &ServiceDistribution::erlang, py::arg("shape"), py::arg("mean"))
        .def_static(
            "hyperexponential",
            [](const std::vector<std::pair<double, double>>& branches) {
                std::vector<HyperBranch> b;
                for (const auto& [w, mean] : branches) b.push_back({w, mean});
                return ServiceDistribution::hyperexponential(std::move(b));
            },
            py::arg("branches"))
        .def_static("uniform", &ServiceDistribution::uniform, py::arg("lo"), py::arg("hi"))
        .def_property_readonly("kind", [](const ServiceDistribution& d) { return to_string(d.kind()); })
        .def_property_readonly("mean", &ServiceDistribution::mean)
        .def("moment", &ServiceDistribution::moment, py::arg("j"))
        .def("__str__", &ServiceDistribution::describe)
        .def("__repr__", [](const ServiceDistribution& d) { return "Service('" + d.describe() + "')"; })
        .def(py::self == py::self);
    py::implicitly_convertible<std::string, ServiceDistribution>();

    py::class_<PacketLaw>(m, "PacketLaw")
        .def(py::init(&PacketLaw::from_pairs), py::arg("pairs"))
        .def(py::init(&PacketLaw::constant), py::arg("packets"))
        .def_property_readonly("lower", &PacketLaw::lower)
        .def_property_readonly("upper", &PacketLaw::upper)
        .def("prob", &PacketLaw::prob)
        .def("mean", &PacketLaw::mean)
        .def("shifted", &PacketLaw::shifted, py::arg("k"))
        .def("pairs", &PacketLaw::pairs);
    py::implicitly_convertible<int, PacketLaw>();

    py::class_<ZetaPmf>(m, "ZetaPmf")
        .def_static("point", &ZetaPmf::point, py::arg("capacity"))
        .def_readonly("lower", &ZetaPmf::lower)
        .def_readonly("probs", &ZetaPmf::probs)
        .def_readonly("mean", &ZetaPmf::mean)
        .def_property_readonly("upper", &ZetaPmf::upper)
        .def("prob", &ZetaPmf::prob)
        .def("generating", &ZetaPmf::generating, py::arg("phi"));

    m.def("lst", &lst, py::arg("service"), py::arg("s"));
    m.def("lst_deriv", &lst_deriv, py::arg("service"), py::arg("s"), py::arg("order"));
    m.def("offered_load", &offered_load, py::arg("service"), py::arg("lam"));
    m.def(
        "traffic_moments",
        [](const ServiceDistribution& d, double lam, int j_max) { return traffic_moments(d, lam, j_max).rho_j; },
        py::arg("service"), py::arg("lam"), py::arg("j_max"), "lambda^j E[X^j] for j = 1..j_max");
    m.def(
        "pi_probs",
        [](const ServiceDistribution& d, double lam, double tail_tol) {
            auto pv = pi_probs(d, lam, tail_tol);
            return py::make_tuple(pv.probs, pv.tail_mass);
        },
        py::arg("service"), py::arg("lam"), py::arg("tail_tol") = kDefaultTailTol);
    m.def("zeta_pmf", &zeta_pmf, py::arg("nu"), py::arg("buffer"));

    m.def(
        "solve_q",
        [](const std::vector<double>& r, double q0, std::size_t k_max) {
            return solve_q(KernelDistribution::from(r), q0, k_max).values();
        },
        py::arg("kernel"), py::arg("q0"), py::arg("k_max"));

    py::class_<BusyPeriodCharacteristics>(m, "Characteristics")
        .def_readonly("e_t", &BusyPeriodCharacteristics::e_t)
        .def_readonly("e_p", &BusyPeriodCharacteristics::e_p)
        .def_readonly("e_m", &BusyPeriodCharacteristics::e_m)
        .def_readonly("e_r", &BusyPeriodCharacteristics::e_r)
        .def_readonly("p", &BusyPeriodCharacteristics::p_mark)
        .def_property_readonly("pi", [](const BusyPeriodCharacteristics& c) { return loss_probability(c); })
        .def("__repr__", [](const BusyPeriodCharacteristics& c) {
            return py::str("Characteristics(e_t={}, e_p={}, e_m={}, e_r={}, pi={})")
                .format(c.e_t, c.e_p, c.e_m, c.e_r, loss_probability(c));
        });

    m.def("fixed_characteristics", &fixed_characteristics, py::arg("capacity"), py::arg("lam"),
          py::arg("service"), py::arg("p") = 0.0);
    m.def("mixture_characteristics", &mixture_characteristics, py::arg("zeta"), py::arg("lam"),
          py::arg("service"), py::arg("p") = 0.0);
    m.def(
        "analyze",
        [](double lam, const ServiceDistribution& d, const PacketLaw& nu, int buffer, double p) {
            return mixture_characteristics(zeta_pmf(nu, buffer), lam, d, p);
        },
        py::arg("lam"), py::arg("service"), py::arg("nu"), py::arg("buffer"), py::arg("p") = 0.0);
    m.def("loss_probability", &loss_probability, py::arg("chars"));

    m.def(
        "phi_root",
        [](double lam, const ServiceDistribution& d) {
            auto r = phi_root(lam, d);
            return py::make_tuple(r.phi, r.slope);
        },
        py::arg("lam"), py::arg("service"));
    m.def(
        "classify",
        [](double lam, const ServiceDistribution& d, const PacketLaw& nu, int buffer, double p,
           double heavy_traffic_eps, double zero_c) {
            RegimeOptions opts;
            opts.heavy_traffic_eps = heavy_traffic_eps;
            opts.zero_c = zero_c;
            auto rep = classify(lam, d, zeta_pmf(nu, buffer), p, opts);
            py::dict out;
            out["regime"] = to_string(rep.regime);
            out["rho"] = rep.rho;
            out["mean_zeta"] = rep.mean_zeta;
            out["phi"] = rep.phi;
            out["flags"] = rep.flags;
            out["loss_asymptote"] = loss_asymptote(rep, p).value;
            return out;
        },
        py::arg("lam"), py::arg("service"), py::arg("nu"), py::arg("buffer"), py::arg("p") = 0.0,
        py::arg("heavy_traffic_eps") = 0.1, py::arg("zero_c") = 0.05);

    m.def(
        "simulate",
        [](double lam, const ServiceDistribution& d, const PacketLaw& nu, int buffer, double p,
           const std::string& zeta_mode, std::int64_t cycles, int replications, std::uint64_t seed,
           unsigned threads) {
            SimConfig cfg;
            cfg.lambda = lam;
            cfg.dist = d;
            cfg.nu = nu;
            cfg.buffer = buffer;
            cfg.p = p;
            cfg.zeta_mode = parse_zeta_mode(zeta_mode);
            cfg.n_busy_periods = cycles;
            cfg.replications = replications;
            cfg.seed = seed;
            cfg.threads = threads;
            SimResult res;
            {
                py::gil_scoped_release release;
                res = run(cfg);
            }
            py::dict out = estimate_dict(res.summary);
            py::list reps;
            for (const auto& r : res.replications) reps.append(estimate_dict(r));
            out["replications"] = reps;
            return out;
        },
        py::arg("lam"), py::arg("service"), py::arg("nu"), py::arg("buffer"), py::arg("p") = 0.0,
        py::arg("zeta_mode") = "iid_per_arrival", py::arg("cycles") = 100000, py::arg("replications") = 1,
        py::arg("seed") = 1, py::arg("threads") = 0);

    m.def("message_corruption_prob", &message_corruption_prob, py::arg("q"), py::arg("l"), py::arg("k"),
          py::arg("recover_threshold") = py::none());
    m.def(
        "sweep",
        [](double q, int l, double lam, const ServiceDistribution& d, const PacketLaw& nu, int buffer,
           const std::vector<int>& k_range, std::optional<int> recover_threshold, bool exact) {
            RedundancyScenario sc;
            sc.q = q;
            sc.l = l;
            sc.recover_threshold = recover_threshold;
            sc.lambda = lam;
            sc.service = d;
            sc.nu = nu;
            sc.buffer = buffer;
            SweepOptions opts;
            opts.exact = exact;
            auto table = sweep(sc, k_range, opts);
            py::list rows;
            for (const auto& r : table.rows) {
                py::dict row;
                row["k"] = r.k;
                row["p"] = r.p_breve;
                row["rho"] = r.rho_breve;
                row["regime"] = to_string(r.regime);
                row["pi_predicted"] = r.pi_predicted;
                row["pi_exact"] = r.pi_exact;
                rows.append(row);
            }
            return rows;
        },
        py::arg("q"), py::arg("l"), py::arg("lam"), py::arg("service"), py::arg("nu"), py::arg("buffer"),
        py::arg("k_range"), py::arg("recover_threshold") = py::none(), py::arg("exact") = true);

    py::class_<RunConfig>(m, "RunConfig")
        .def_static("parse", &parse_config, py::arg("text"))
        .def("emit", &emit_config)
        .def_property(
            "command", [](const RunConfig& c) { return to_string(c.command.name); },
            [](RunConfig& c, const std::string& s) { c.command.name = parse_command(s); })
        .def_property(
            "format", [](const RunConfig& c) { return to_string(c.output.format); },
            [](RunConfig& c, const std::string& s) { c.output.format = parse_format(s); })
        .def_property(
            "seed", [](const RunConfig& c) { return c.command.seed; },
            [](RunConfig& c, std::uint64_t s) { c.command.seed = s; });

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("emit_config", &emit_config, py::arg("config"));
    m.def(
        "execute",
        [](const RunConfig& cfg) {
            Execution ex;
            {
                py::gil_scoped_release release;
                ex = execute(cfg);
            }
            py::dict out;
            out["exit_code"] = static_cast<int>(ex.exit_code);
            out["document"] = ex.document;
            out["message"] = ex.message;
            py::dict side;
            for (const auto& a : ex.side_files) side[py::str(a.path)] = a.content;
            out["side_files"] = side;
            return out;
        },
        py::arg("config"), "Runs the configured command in memory; nothing is written to disk.");
}
