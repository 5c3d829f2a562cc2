#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covshift/config.hpp"
#include "covshift/hardness.hpp"
#include "covshift/harness.hpp"
#include "covshift/rejection.hpp"

namespace py = pybind11;
using namespace covshift;

namespace {

std::vector<Point> to_points(std::span<const Point> s) { return {s.begin(), s.end()}; }

py::dict report_dict(const DaRunReport& r) {
    py::dict d;
    d["hypothesis"] = r.hypothesis.to_string();
    d["df_analytic"] = r.df_analytic;
    d["n"] = r.n;
    d["w"] = r.w;
    d["eps"] = r.eps;
    d["delta"] = r.delta;
    d["m1"] = r.m1;
    d["heavy_cutoff"] = r.heavy_cutoff;
    d["m2_prime"] = r.m2_prime;
    d["m2_budget"] = r.m2_budget;
    d["drawn_count"] = r.drawn_count;
    d["accepted_count"] = r.accepted_count;
    d["empirical_acceptance_rate"] = r.empirical_acceptance_rate;
    d["acceptance_floor"] = r.acceptance_floor;
    d["acceptance_floor_ok"] = r.acceptance_floor_ok;
    d["shortfall"] = r.shortfall;
    d["d_df_target"] = r.d_df_target;
    d["unnormalized_deviation"] = r.unnormalized_deviation;
    d["df_error"] = r.df_error;
    d["target_error"] = r.target_error;
    d["estimation_passed"] = r.estimation_passed;
    d["claim1_holds"] = r.claim1_holds;
    d["truncated"] = r.truncated;
    d["success"] = r.success();
    return d;
}

}  // namespace

PYBIND11_MODULE(_covshift, m) {
    m.doc() = "Covariate-shift PAC learning by rejection sampling";

    py::register_exception<WeightRatioViolation>(m, "WeightRatioViolation", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<DiscretePmf>(m, "DiscretePmf")
        .def(py::init<std::vector<Point>, std::vector<double>>(), py::arg("support"), py::arg("mass"))
        .def_static("from_weights", &DiscretePmf::from_weights, py::arg("support"), py::arg("weights"))
        .def_static("point_mass", &DiscretePmf::point_mass)
        .def_static("uniform", &DiscretePmf::uniform, py::arg("lo"), py::arg("hi"))
        .def_static("binomial", &DiscretePmf::binomial, py::arg("n"), py::arg("p"))
        .def_static("geometric_truncated", &DiscretePmf::geometric_truncated, py::arg("p"), py::arg("n"))
        .def_static("parse", &parse_pmf)
        .def_property_readonly("support", [](const DiscretePmf& p) { return to_points(p.support()); })
        .def_property_readonly("mass",
                               [](const DiscretePmf& p) { return std::vector<double>(p.mass().begin(), p.mass().end()); })
        .def("mean", &DiscretePmf::mean)
        .def("std_dev", &DiscretePmf::std_dev)
        .def("__call__", &DiscretePmf::operator())
        .def("__len__", &DiscretePmf::size)
        .def("__eq__", [](const DiscretePmf& a, const DiscretePmf& b) { return a == b; })
        .def("__repr__", &DiscretePmf::to_literal)
        .def("sample", [](const DiscretePmf& p, std::size_t count, std::uint64_t seed) {
            Rng rng = make_rng(seed);
            return sample(p, rng, count);
        }, py::arg("count"), py::arg("seed"));

    m.def("l1_distance", [](const DiscretePmf& p, const DiscretePmf& q) {
        const auto r = l1_distance(p, q);
        return py::make_tuple(r.l1, r.witness_event);
    }, "(distance, witness event {x : p(x) > q(x)})");
    m.def("weight_ratio", [](const DiscretePmf& s, const DiscretePmf& t) -> py::object {
        const auto r = weight_ratio(s, t);
        if (r.violated()) return py::none();
        return py::make_tuple(*r.ratio, r.witness_point);
    }, "(ratio, witness point), or None when the target leaves the source support");
    m.def("truncate", [](const DiscretePmf& p, Point lo, Point hi) {
        auto t = truncate(p, lo, hi);
        return py::make_tuple(std::move(t.pmf), t.dropped_mass);
    });

    py::class_<Hypothesis>(m, "Hypothesis")
        .def_static("interval", &Hypothesis::interval)
        .def_static("empty", &Hypothesis::empty_interval)
        .def_static("constant", &Hypothesis::constant)
        .def_static("table", &Hypothesis::table)
        .def_static("parse", &parse_hypothesis)
        .def("__call__", &Hypothesis::operator())
        .def("__eq__", [](const Hypothesis& a, const Hypothesis& b) { return a == b; })
        .def("__repr__", &Hypothesis::to_string);

    py::class_<HypothesisClass>(m, "HypothesisClass")
        .def_static("intervals", &HypothesisClass::intervals)
        .def_static("tables", &HypothesisClass::lookup_tables)
        .def_static("parse", &parse_class)
        .def("__len__", &HypothesisClass::size)
        .def_property_readonly("members", [](const HypothesisClass& c) {
            return std::vector<Hypothesis>(c.members().begin(), c.members().end());
        })
        .def("__repr__", &HypothesisClass::descriptor);

    m.def("exact_error", &exact_error, py::arg("h"), py::arg("c"), py::arg("p"));
    m.def("discrepancy", [](const DiscretePmf& p, const DiscretePmf& q, const HypothesisClass& hc,
                            const Hypothesis& c, double bound) { return discrepancy(p, q, hc, c, {bound}); },
          py::arg("p"), py::arg("q"), py::arg("hclass"), py::arg("c"), py::arg("loss_bound") = 1.0);
    m.def("erm_learn", [](const std::vector<std::pair<Point, bool>>& samples, const HypothesisClass& hc) {
        std::vector<LabeledPoint> s;
        for (const auto& [x, y] : samples) s.push_back({x, y});
        return erm_learn(s, hc);
    });
    m.def("pac_sample_size", &pac_sample_size);
    m.def("check_theorem1_bound", [](const Hypothesis& h, const Hypothesis& c, const DiscretePmf& s,
                                     const DiscretePmf& t) {
        const auto r = check_theorem1_bound(h, c, s, t);
        return py::make_tuple(r.lhs, r.rhs, r.holds);
    });
    m.def("check_prop2_bound", [](const Hypothesis& h, const Hypothesis& c, const DiscretePmf& p,
                                  const DiscretePmf& q) {
        const auto r = check_prop2_bound(h, c, p, q);
        return py::make_tuple(r.lhs, r.rhs, r.holds);
    });

    m.def("chernoff_sample_size", &chernoff_sample_size, py::arg("n"), py::arg("w"), py::arg("eps"), py::arg("delta"));
    m.def("heavy_cutoff", &heavy_cutoff);
    m.def("chebyshev_support_size", &chebyshev_support_size, py::arg("s"), py::arg("eps"),
          py::arg("allow_large_eps") = false);
    m.def("rejection_budget", &rejection_budget);

    m.def("run_da_pipeline",
          [](const DiscretePmf& source, const DiscretePmf& target, const Hypothesis& truth, const HypothesisClass& hc,
             double eps, double delta, std::uint64_t seed, bool inject_exact, std::optional<double> s_bound) {
              Rng rng = make_rng(seed);
              PipelineOptions opt;
              opt.inject_exact = inject_exact;
              opt.s_bound = s_bound;
              std::optional<DaRunReport> r;
              {
                  py::gil_scoped_release release;
                  r = run_da_pipeline(source, target, truth, hc, eps, delta, rng, opt);
              }
              return report_dict(*r);
          },
          py::arg("source"), py::arg("target"), py::arg("truth"), py::arg("hclass"), py::arg("eps"), py::arg("delta"),
          py::arg("seed") = 0, py::arg("inject_exact") = false, py::arg("s_bound") = std::nullopt);

    m.def("memorization_error_analytic", &memorization_error_analytic);
    m.def("analytic_crossing", &analytic_crossing, py::arg("n"), py::arg("threshold") = 0.25);
    m.def("hardness_curve",
          [](int n, std::vector<std::uint64_t> ks, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
              std::vector<HardnessRow> rows;
              {
                  py::gil_scoped_release release;
                  rows = hardness_curve(n, ks, trials, seed, workers);
              }
              py::list out;
              for (const auto& r : rows) {
                  py::dict d;
                  d["n"] = r.n;
                  d["k"] = r.k;
                  d["trials"] = r.trials;
                  d["mean_error"] = r.mean_error;
                  d["analytic_error"] = r.analytic_error;
                  d["pessimistic_error"] = r.pessimistic_error;
                  d["std_err"] = r.std_err;
                  out.append(d);
              }
              return out;
          },
          py::arg("n"), py::arg("ks"), py::arg("trials"), py::arg("seed") = 0, py::arg("workers") = 1);

    m.def("run_experiment", [](const std::string& config_text) {
        const auto config = parse_config(config_text);
        std::optional<RunResult> r;
        {
            py::gil_scoped_release release;
            r = run(config);
        }
        return py::make_tuple(to_csv(*r), summary_json(*r));
    }, "Run a `key = value` experiment config; returns (csv rows, summary json).");
    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); });
    m.attr("SCHEMA_VERSION") = kSchemaVersion;
}
