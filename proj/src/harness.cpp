#include "covshift/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "covshift/hardness.hpp"
#include "covshift/oracles.hpp"
#include "covshift/parallel.hpp"
#include "covshift/rejection.hpp"

namespace covshift {

namespace {

using Clock = std::chrono::steady_clock;
using TrialFn = std::function<TrialReport(std::uint64_t trial, std::uint64_t seed)>;

constexpr double kProp1Slack = 1e-12;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string join_points(const std::vector<Point>& points) {
    std::string out = "{";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(points[i]);
    }
    return out + "}";
}

std::vector<TrialReport> run_trials(const ExperimentConfig& c, const TrialFn& fn) {
    std::vector<TrialReport> rows(c.trials);
    parallel_for(c.trials, c.workers, [&](std::size_t i) {
        const auto start = Clock::now();
        const auto seed = derive_seed(c.master_seed, i);
        rows[i] = fn(i, seed);
        rows[i].trial = i;
        rows[i].seed = seed;
        rows[i].wall_seconds = seconds_since(start);
    });
    return rows;
}

void fill_rate_summary(Summary& s, const std::vector<TrialReport>& rows, double nominal) {
    s.rows = rows.size();
    s.successes = static_cast<std::uint64_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.pass; }));
    s.success_fraction = rows.empty() ? 0.0 : static_cast<double>(s.successes) / static_cast<double>(rows.size());
    s.nominal = nominal;
    s.sigma = std::sqrt(nominal * (1.0 - nominal) / static_cast<double>(std::max<std::size_t>(rows.size(), 1)));
    s.threshold = nominal - 3.0 * s.sigma;
    s.passed = s.success_fraction >= s.threshold;
}

std::size_t column_index(const std::vector<std::string>& columns, const std::string& name) {
    return static_cast<std::size_t>(std::find(columns.begin(), columns.end(), name) - columns.begin());
}

DiscretePmf random_pmf(Rng& rng, int n, double zero_probability) {
    std::vector<Point> support(static_cast<std::size_t>(n));
    std::iota(support.begin(), support.end(), Point{1});
    std::vector<double> weights(support.size());
    double total = 0.0;
    for (auto& v : weights) {
        v = uniform01(rng) < zero_probability ? 0.0 : -std::log1p(-uniform01(rng));
        total += v;
    }
    if (!(total > 0.0)) weights[rng() % weights.size()] = 1.0;
    return DiscretePmf::from_weights(std::move(support), std::move(weights));
}

Hypothesis random_table(Rng& rng, int n) {
    std::vector<std::pair<Point, bool>> entries;
    for (Point x = 1; x <= n; ++x) entries.emplace_back(x, (rng() >> 63) != 0);
    return Hypothesis::table(std::move(entries));
}

void require_weight_ratio(const DiscretePmf& source, const DiscretePmf& target) {
    const auto ratio = weight_ratio(source, target);
    if (ratio.violated()) throw WeightRatioViolation(ratio.witness_point);
}

PipelineOptions pipeline_options(const ExperimentConfig& c) {
    PipelineOptions opt;
    opt.estimation = c.estimation;
    opt.thinning = c.thinning;
    opt.w_override = c.w_expected;
    opt.s_bound = c.s_bound;
    opt.inject_exact = c.inject_exact;
    return opt;
}

void run_dist_metrics(RunResult& out) {
    const auto& c = out.config;
    const auto source = parse_pmf(c.source);
    const auto target = parse_pmf(c.target);
    out.columns = {"l1", "l1_witness", "weight_ratio", "w", "ratio_witness", "violated", "source_std_dev",
                   "target_std_dev"};
    const auto dist = l1_distance(source, target);
    const auto ratio = weight_ratio(source, target);
    TrialReport row;
    row.seed = derive_seed(c.master_seed, 0);
    row.values = {dist.l1,
                  join_points(dist.witness_event),
                  ratio.violated() ? Cell{std::string("violated")} : Cell{*ratio.ratio},
                  ratio.violated() ? Cell{std::string("violated")} : Cell{ratio.w()},
                  static_cast<std::int64_t>(ratio.witness_point),
                  ratio.violated(),
                  source.std_dev(),
                  target.std_dev()};
    row.pass = true;
    out.rows.push_back(std::move(row));
    fill_rate_summary(out.summary, out.rows, 1.0);
}

void run_bounds_check(RunResult& out) {
    const auto& c = out.config;
    out.columns = {"n",        "class_size", "loss_bound", "discrepancy", "two_m_l1", "prop1_ok", "thm1_lhs",
                   "thm1_rhs", "thm1_ok",    "prop2_lhs",  "prop2_rhs",   "prop2_ok"};
    out.rows = run_trials(c, [&](std::uint64_t, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        const auto p = random_pmf(rng, c.n, 0.0);  // full support keeps the weight ratio defined
        const auto q = random_pmf(rng, c.n, 0.25);
        const auto truth = random_table(rng, c.n);
        std::vector<Hypothesis> members;
        const std::size_t class_size = 1 + rng() % 50;
        for (std::size_t k = 0; k < class_size; ++k) members.push_back(random_table(rng, c.n));
        const auto hclass = HypothesisClass::lookup_tables(std::move(members));
        const LossSpec loss{0.5 + 1.5 * uniform01(rng)};
        const auto& h = hclass.members()[rng() % hclass.size()];

        const double disc = discrepancy(p, q, hclass, truth, loss);
        const double two_m_d = 2.0 * loss.bound * l1_distance(p, q).l1;
        const bool prop1_ok = disc <= two_m_d + kProp1Slack;
        const auto thm1 = check_theorem1_bound(h, truth, p, q);
        const auto prop2 = check_prop2_bound(h, truth, p, q);

        TrialReport row;
        row.values = {static_cast<std::int64_t>(c.n), static_cast<std::uint64_t>(class_size), loss.bound, disc,
                      two_m_d, prop1_ok, thm1.lhs, thm1.rhs, thm1.holds, prop2.lhs, prop2.rhs, prop2.holds};
        row.pass = prop1_ok && thm1.holds && prop2.holds;
        return row;
    });
    fill_rate_summary(out.summary, out.rows, 1.0);
    out.summary.metrics.emplace_back("prop1_slack", kProp1Slack);
}

void run_lemma1(RunResult& out) {
    const auto& c = out.config;
    const auto source = parse_pmf(c.source);
    const auto target = parse_pmf(c.target);
    require_weight_ratio(source, target);
    const double w = c.w_expected.value_or(weight_ratio(source, target).w());
    const auto support = union_support(source, target);
    const auto budget = BudgetPlan::make(support.size(), w, c.eps, c.delta);
    const auto heavy = heavy_points(source, budget).heavy.size();

    out.columns = {"n", "w", "eps", "delta", "m1", "heavy_cutoff", "heavy_count", "d_df_target",
                   "unnormalized_deviation"};
    out.rows = run_trials(c, [&](std::uint64_t, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        auto source_oracle = SampleOracle::unlabeled(source, rng());
        auto target_oracle = SampleOracle::unlabeled(target, rng());
        const auto src_est = c.inject_exact ? EmpiricalEstimate::from_pmf(source, support)
                                            : estimate_pmf(source_oracle, budget.m1, support, c.estimation);
        const auto tgt_est = c.inject_exact ? EmpiricalEstimate::from_pmf(target, support)
                                            : estimate_pmf(target_oracle, budget.m1, support, c.estimation);
        const auto plan = build_plan(src_est, tgt_est, 1, w, c.delta);
        const double d = l1_distance(analytic_df(source, plan), target).l1;

        TrialReport row;
        row.values = {static_cast<std::uint64_t>(budget.n),
                      budget.w,
                      budget.eps,
                      budget.delta,
                      c.inject_exact ? std::uint64_t{0} : budget.m1,
                      budget.heavy_cutoff,
                      static_cast<std::uint64_t>(heavy),
                      d,
                      unnormalized_deviation(source, target, plan)};
        row.pass = d <= c.eps;
        return row;
    });
    fill_rate_summary(out.summary, out.rows, 1.0 - c.delta);
    out.summary.metrics.emplace_back("m1", static_cast<double>(budget.m1));
}

std::vector<Cell> pipeline_cells(const DaRunReport& r) {
    return {r.n,
            r.w,
            r.eps,
            r.delta,
            r.m1,
            r.heavy_cutoff,
            r.m2_prime,
            r.m2_budget,
            r.drawn_count,
            r.accepted_count,
            r.empirical_acceptance_rate,
            r.acceptance_floor,
            r.acceptance_floor_ok,
            r.shortfall,
            r.estimation_passed,
            r.d_df_target,
            r.unnormalized_deviation,
            r.df_error,
            r.target_error,
            r.claim1_premise,
            r.claim1_holds,
            r.truncated,
            r.dropped_source,
            r.dropped_target,
            r.hypothesis.to_string()};
}

const std::vector<std::string>& pipeline_columns() {
    static const std::vector<std::string> columns = {
        "n",           "w",           "eps",          "delta",
        "m1",          "heavy_cutoff", "m2_prime",    "m2_budget",
        "drawn",       "accepted",    "acceptance_rate", "acceptance_floor",
        "floor_ok",    "shortfall",   "estimation_passed", "d_df_target",
        "unnormalized_deviation", "df_error", "target_error", "claim1_premise",
        "claim1_holds", "truncated",  "dropped_source", "dropped_target",
        "hypothesis"};
    return columns;
}

void run_theorem2(RunResult& out) {
    const auto& c = out.config;
    const auto source = parse_pmf(c.source);
    const auto target = parse_pmf(c.target);
    const auto truth = parse_hypothesis(c.truth);
    const auto hclass = parse_class(c.hclass);
    require_weight_ratio(source, target);
    const auto options = pipeline_options(c);

    out.columns = pipeline_columns();
    out.rows = run_trials(c, [&](std::uint64_t, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        const auto report = run_da_pipeline(source, target, truth, hclass, c.eps, c.delta, rng, options);
        TrialReport row;
        row.values = pipeline_cells(report);
        row.pass = report.success();
        return row;
    });

    auto& s = out.summary;
    fill_rate_summary(s, out.rows, 1.0 - c.delta);
    const auto floor_col = column_index(out.columns, "floor_ok");
    const auto est_col = column_index(out.columns, "estimation_passed");
    const auto shortfall_col = column_index(out.columns, "shortfall");
    const auto claim_col = column_index(out.columns, "claim1_holds");
    std::uint64_t estimated = 0;
    std::uint64_t floor_violations = 0;
    std::uint64_t shortfalls = 0;
    std::uint64_t claim1_violations = 0;
    for (const auto& row : out.rows) {
        const bool passed_estimation = std::get<bool>(row.values[est_col]);
        estimated += passed_estimation;
        floor_violations += passed_estimation && !std::get<bool>(row.values[floor_col]);
        shortfalls += std::get<bool>(row.values[shortfall_col]);
        claim1_violations += !std::get<bool>(row.values[claim_col]);
    }
    s.metrics.emplace_back("estimation_passed_trials", static_cast<double>(estimated));
    s.metrics.emplace_back("floor_violations", static_cast<double>(floor_violations));
    s.metrics.emplace_back("shortfall_trials", static_cast<double>(shortfalls));
    s.metrics.emplace_back("claim1_violations", static_cast<double>(claim1_violations));
    s.passed = s.passed && floor_violations == 0 && claim1_violations == 0;
    s.notes.emplace_back("size_parameter", "free size parameter read as the (truncated) support size n");
}

void run_compare(RunResult& out) {
    const auto& c = out.config;
    const auto source = parse_pmf(c.source);
    const auto target = parse_pmf(c.target);
    const auto truth = parse_hypothesis(c.truth);
    const auto hclass = parse_class(c.hclass);
    require_weight_ratio(source, target);
    const auto options = pipeline_options(c);

    out.columns = {"m2_budget", "accepted", "naive_error", "rejection_error", "naive_hypothesis",
                   "rejection_hypothesis"};
    out.rows = run_trials(c, [&](std::uint64_t, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        const auto report = run_da_pipeline(source, target, truth, hclass, c.eps, c.delta, rng, options);
        // Naive baseline: ERM on the same number of raw source draws.
        auto oracle = SampleOracle::labeled(source, truth, derive_seed(seed, 1));
        std::vector<LabeledPoint> raw;
        raw.reserve(report.drawn_count);
        for (std::uint64_t k = 0; k < report.drawn_count; ++k) raw.push_back(oracle.draw_labeled());
        const auto naive = erm_learn(raw, hclass);
        const double naive_error = exact_error(naive, truth, target);

        TrialReport row;
        row.values = {report.m2_budget,   report.accepted_count,           naive_error,
                      report.target_error, naive.to_string(), report.hypothesis.to_string()};
        row.pass = report.success();
        return row;
    });

    auto& s = out.summary;
    fill_rate_summary(s, out.rows, 1.0 - c.delta);
    const auto naive_col = column_index(out.columns, "naive_error");
    const auto rej_col = column_index(out.columns, "rejection_error");
    const double count = static_cast<double>(out.rows.size());
    double naive_mean = 0.0;
    double rej_mean = 0.0;
    double diff_mean = 0.0;
    for (const auto& row : out.rows) {
        naive_mean += std::get<double>(row.values[naive_col]);
        rej_mean += std::get<double>(row.values[rej_col]);
    }
    naive_mean /= count;
    rej_mean /= count;
    diff_mean = rej_mean - naive_mean;
    double ss = 0.0;
    for (const auto& row : out.rows) {
        const double d = std::get<double>(row.values[rej_col]) - std::get<double>(row.values[naive_col]) - diff_mean;
        ss += d * d;
    }
    const double se_diff = out.rows.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
    const bool ordering_ok = rej_mean <= naive_mean + 3.0 * se_diff;
    s.metrics.emplace_back("naive_mean_error", naive_mean);
    s.metrics.emplace_back("rejection_mean_error", rej_mean);
    s.metrics.emplace_back("se_difference", se_diff);
    s.metrics.emplace_back("ordering_ok", ordering_ok ? 1.0 : 0.0);
    s.passed = ordering_ok;
}

void run_complexity(RunResult& out) {
    const auto& c = out.config;
    const auto hclass = parse_class(c.hclass);
    double w = 0.0;
    if (c.w_expected) {
        w = *c.w_expected;
    } else {
        const auto source = parse_pmf(c.source);
        const auto target = parse_pmf(c.target);
        require_weight_ratio(source, target);
        w = weight_ratio(source, target).w();
    }
    const double s = *c.s_bound;
    const auto n = chebyshev_support_size(s, c.eps / 2.0);
    const auto m1 = chernoff_sample_size(n, w, c.eps / 4.0, c.delta / 2.0);
    const auto m2_prime = pac_sample_size(hclass.size(), c.eps / 2.0, c.delta / 2.0);
    const auto m2 = rejection_budget(m2_prime, w, c.delta);

    // Closed-form total with f = m2_prime, printed for reference only.
    const double root = s * std::sqrt(2.0 / c.eps);
    const double closed_form = static_cast<double>(m2_prime) * w * w * std::log(4.0 / c.delta) +
                               (std::log(8.0 * root) + std::log(1.0 / c.delta)) *
                                   (32768.0 * root * w * w / (c.eps * c.eps * c.eps));

    out.columns = {"s_bound", "eps", "delta", "w", "class_size", "n", "m1", "m2_prime", "m2", "total",
                   "closed_form_total"};
    TrialReport row;
    row.seed = derive_seed(c.master_seed, 0);
    row.values = {s, c.eps, c.delta, w, static_cast<std::uint64_t>(hclass.size()), n, m1, m2_prime, m2, m1 + m2,
                  closed_form};
    row.pass = true;
    out.rows.push_back(std::move(row));
    fill_rate_summary(out.summary, out.rows, 1.0);
    out.summary.notes.emplace_back("size_parameter", "free size parameter read as the truncated support size n");
    out.summary.notes.emplace_back("budget_split", "m1 at eps/4, delta/2; m2' at eps/2, delta/2");
}

void run_hardness(RunResult& out) {
    const auto& c = out.config;
    out.columns = {"n", "k", "trials", "mean_error", "analytic_error", "pessimistic_error", "std_err", "tolerance"};
    const auto curve = hardness_curve(c.n, c.ks, c.trials, c.master_seed, c.workers);
    std::optional<std::uint64_t> crossing;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& r = curve[i];
        TrialReport row;
        row.trial = i;
        row.seed = derive_seed(c.master_seed, r.k);
        row.values = {static_cast<std::int64_t>(r.n), r.k, r.trials, r.mean_error, r.analytic_error,
                      r.pessimistic_error, r.std_err, c.tolerance};
        row.pass = std::abs(r.mean_error - r.analytic_error) <= c.tolerance;
        if (r.mean_error <= 0.25 && (!crossing || r.k < *crossing)) crossing = r.k;
        out.rows.push_back(std::move(row));
    }
    fill_rate_summary(out.summary, out.rows, 1.0);
    out.summary.metrics.emplace_back("analytic_crossing_k", static_cast<double>(analytic_crossing(c.n, 0.25)));
    out.summary.metrics.emplace_back("analytic_crossing_real", analytic_crossing_real(c.n, 0.25));
    out.summary.metrics.emplace_back("first_listed_k_below_quarter", crossing ? static_cast<double>(*crossing) : -1.0);
    out.summary.notes.emplace_back("certified_column", "analytic_error; pessimistic_error is reported only");
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string cell_text(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>)
                return csv_escape(v);
            else
                return std::to_string(v);
        },
        cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
    return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, cell);
}

nlohmann::ordered_json summary_object(const RunResult& result, bool with_timing) {
    const auto& s = result.summary;
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = s.kind;
    j["master_seed"] = result.config.master_seed;
    j["rows"] = s.rows;
    j["successes"] = s.successes;
    j["success_fraction"] = s.success_fraction;
    j["nominal"] = s.nominal;
    j["sigma"] = s.sigma;
    j["threshold"] = s.threshold;
    j["passed"] = s.passed;
    auto metrics = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.metrics) metrics[k] = v;
    j["metrics"] = metrics;
    auto notes = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.notes) notes[k] = v;
    j["notes"] = notes;
    if (with_timing) j["wall_seconds"] = s.wall_seconds;
    return j;
}

}  // namespace

double binomial_threshold(double nominal, std::uint64_t trials) {
    const double t = static_cast<double>(std::max<std::uint64_t>(trials, 1));
    return nominal - 3.0 * std::sqrt(nominal * (1.0 - nominal) / t);
}

RunResult run(const ExperimentConfig& config) {
    validate(config);
    const auto start = Clock::now();
    RunResult out;
    out.config = config;
    out.summary.kind = std::string(to_string(config.kind));
    switch (config.kind) {
        case ExperimentKind::DistMetrics: run_dist_metrics(out); break;
        case ExperimentKind::BoundsCheck: run_bounds_check(out); break;
        case ExperimentKind::Lemma1: run_lemma1(out); break;
        case ExperimentKind::Theorem2: run_theorem2(out); break;
        case ExperimentKind::Hardness: run_hardness(out); break;
        case ExperimentKind::Compare: run_compare(out); break;
        case ExperimentKind::Complexity: run_complexity(out); break;
    }
    out.summary.wall_seconds = seconds_since(start);
    return out;
}

std::string to_csv(const RunResult& result) {
    std::ostringstream os;
    os << "schema_version,kind,trial,seed";
    for (const auto& col : result.columns) os << ',' << col;
    os << ",pass\n";
    const auto kind = to_string(result.config.kind);
    for (const auto& row : result.rows) {
        os << kSchemaVersion << ',' << kind << ',' << row.trial << ',' << row.seed;
        for (const auto& cell : row.values) os << ',' << cell_text(cell);
        os << ',' << (row.pass ? "true" : "false") << '\n';
    }
    return os.str();
}

std::string to_json(const RunResult& result) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = std::string(to_string(result.config.kind));
    doc["columns"] = result.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        nlohmann::ordered_json r;
        r["trial"] = row.trial;
        r["seed"] = row.seed;
        for (std::size_t i = 0; i < row.values.size(); ++i) r[result.columns[i]] = cell_json(row.values[i]);
        r["pass"] = row.pass;
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    doc["summary"] = summary_object(result, false);
    return doc.dump(2) + "\n";
}

std::string summary_json(const RunResult& result) { return summary_object(result, true).dump(2) + "\n"; }

}  // namespace covshift
