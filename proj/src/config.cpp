#include "covshift/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace covshift {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::DistMetrics, "dist-metrics"}, {ExperimentKind::BoundsCheck, "bounds-check"},
    {ExperimentKind::Lemma1, "lemma1"},            {ExperimentKind::Theorem2, "theorem2"},
    {ExperimentKind::Hardness, "hardness"},        {ExperimentKind::Compare, "compare"},
    {ExperimentKind::Complexity, "complexity"},
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

// Recursive-descent reader for the literal grammars.
class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string_view identifier() {
        skip_ws();
        const auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return text_.substr(start, pos_ - start);
    }
    std::int64_t integer() {
        skip_ws();
        std::int64_t value = 0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{}) fail("expected integer");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }
    double number() {
        skip_ws();
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{}) fail("expected number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }
    void finish() {
        if (!at_end()) fail("unexpected trailing text");
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::vector<std::pair<Point, double>> pair_list(Cursor& cur) {
    std::vector<std::pair<Point, double>> pairs;
    do {
        cur.expect('(');
        const Point x = cur.integer();
        cur.expect(',');
        const double m = cur.number();
        cur.expect(')');
        pairs.emplace_back(x, m);
    } while (cur.accept(','));
    return pairs;
}

Hypothesis hypothesis_at(Cursor& cur) {
    const auto name = cur.identifier();
    if (name == "empty") return Hypothesis::empty_interval();
    cur.expect('(');
    if (name == "interval") {
        const Point a = cur.integer();
        cur.expect(',');
        const Point b = cur.integer();
        cur.expect(')');
        return Hypothesis::interval(a, b);
    }
    if (name == "const") {
        const auto label = cur.integer();
        if (label != 0 && label != 1) cur.fail("const label must be 0 or 1");
        cur.expect(')');
        return Hypothesis::constant(label == 1);
    }
    if (name == "table") {
        std::vector<std::pair<Point, bool>> entries;
        for (auto [x, label] : pair_list(cur)) {
            if (label != 0.0 && label != 1.0) cur.fail("table labels must be 0 or 1");
            entries.emplace_back(x, label == 1.0);
        }
        cur.expect(')');
        return Hypothesis::table(std::move(entries));
    }
    cur.fail("unknown hypothesis '" + std::string(name) + "'");
}

bool parse_bool(const std::string& key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, "expected true or false");
}

template <class T>
T parse_number(const std::string& key, std::string_view v) {
    T value{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key, "invalid number '" + std::string(v) + "'");
    return value;
}

void require(const ExperimentConfig& c, const std::string& field, const std::string& value) {
    if (value.empty())
        throw ConfigError(field, "required for kind " + std::string(to_string(c.kind)));
}

template <class Fn>
void check_spec(const std::string& field, const std::string& spec, Fn&& parse) {
    try {
        (void)parse(spec);
    } catch (const std::exception& e) {
        throw ConfigError(field, e.what());
    }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
    for (auto [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view text) noexcept {
    for (auto [k, name] : kKindNames) {
        if (name == text) return k;
    }
    return std::nullopt;
}

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

DiscretePmf parse_pmf(std::string_view spec) {
    Cursor cur(spec);
    if (cur.peek('(') || cur.peek('[')) {
        const bool bracket = cur.accept('[');
        auto pairs = pair_list(cur);
        if (bracket) cur.expect(']');
        cur.finish();
        return DiscretePmf::from_pairs(std::move(pairs));
    }
    const auto name = cur.identifier();
    cur.expect('(');
    auto done = [&](DiscretePmf p) {
        cur.expect(')');
        cur.finish();
        return p;
    };
    if (name == "uniform") {
        const Point lo = cur.integer();
        cur.expect(',');
        return done(DiscretePmf::uniform(lo, cur.integer()));
    }
    if (name == "binomial") {
        const auto n = cur.integer();
        cur.expect(',');
        return done(DiscretePmf::binomial(static_cast<int>(n), cur.number()));
    }
    if (name == "geometric_truncated") {
        const double p = cur.number();
        cur.expect(',');
        return done(DiscretePmf::geometric_truncated(p, static_cast<int>(cur.integer())));
    }
    if (name == "point") return done(DiscretePmf::point_mass(cur.integer()));
    if (name == "custom") return done(DiscretePmf::from_pairs(pair_list(cur)));
    cur.fail("unknown pmf generator '" + std::string(name) + "'");
}

Hypothesis parse_hypothesis(std::string_view spec) {
    Cursor cur(spec);
    auto h = hypothesis_at(cur);
    cur.finish();
    return h;
}

HypothesisClass parse_class(std::string_view spec) {
    Cursor cur(spec);
    const auto name = cur.identifier();
    cur.expect('(');
    if (name == "intervals" || name == "all_tables") {
        const auto n = cur.integer();
        cur.expect(')');
        cur.finish();
        if (n < 1 || n > 1'000'000) cur.fail("class size parameter out of range");
        if (name == "intervals") return HypothesisClass::intervals(static_cast<int>(n));
        std::vector<Point> support;
        for (Point x = 1; x <= n; ++x) support.push_back(x);
        return HypothesisClass::all_tables(support);
    }
    if (name == "tables") {
        std::vector<Hypothesis> members;
        do {
            members.push_back(hypothesis_at(cur));
        } while (cur.accept(';'));
        cur.expect(')');
        cur.finish();
        return HypothesisClass::lookup_tables(std::move(members));
    }
    cur.fail("unknown hypothesis class '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        const std::string_view v = trim(line.substr(eq + 1));
        if (key == "seed") key = "master_seed";
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");

        if (key == "kind") {
            auto kind = parse_kind(v);
            if (!kind) throw ConfigError(key, "unknown experiment kind '" + std::string(v) + "'");
            c.kind = *kind;
        } else if (key == "source") {
            c.source = v;
        } else if (key == "target") {
            c.target = v;
        } else if (key == "concept") {
            c.truth = v;
        } else if (key == "class") {
            c.hclass = v;
        } else if (key == "eps") {
            c.eps = parse_number<double>(key, v);
        } else if (key == "delta") {
            c.delta = parse_number<double>(key, v);
        } else if (key == "w_expected") {
            c.w_expected = parse_number<double>(key, v);
        } else if (key == "s_bound") {
            c.s_bound = parse_number<double>(key, v);
        } else if (key == "trials") {
            c.trials = parse_number<std::uint64_t>(key, v);
        } else if (key == "master_seed") {
            c.master_seed = parse_number<std::uint64_t>(key, v);
        } else if (key == "workers") {
            c.workers = parse_number<unsigned>(key, v);
        } else if (key == "output") {
            c.output = v;
        } else if (key == "format") {
            if (v == "csv")
                c.format = OutputFormat::Csv;
            else if (v == "json")
                c.format = OutputFormat::Json;
            else
                throw ConfigError(key, "expected csv or json");
        } else if (key == "n") {
            c.n = parse_number<int>(key, v);
        } else if (key == "ks") {
            c.ks.clear();
            std::string_view rest = v;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                c.ks.push_back(parse_number<std::uint64_t>(key, trim(rest.substr(0, comma))));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        } else if (key == "tolerance") {
            c.tolerance = parse_number<double>(key, v);
        } else if (key == "inject_exact") {
            c.inject_exact = parse_bool(key, v);
        } else if (key == "estimation") {
            if (v == "multinomial")
                c.estimation = EstimationMode::Multinomial;
            else if (v == "streaming")
                c.estimation = EstimationMode::Streaming;
            else
                throw ConfigError(key, "expected multinomial or streaming");
        } else if (key == "thinning") {
            if (v == "streaming")
                c.thinning = ThinningMode::Streaming;
            else if (v == "binomial")
                c.thinning = ThinningMode::Binomial;
            else
                throw ConfigError(key, "expected streaming or binomial");
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "kind = " << to_string(c.kind) << '\n';
    if (!c.source.empty()) os << "source = " << c.source << '\n';
    if (!c.target.empty()) os << "target = " << c.target << '\n';
    if (!c.truth.empty()) os << "concept = " << c.truth << '\n';
    if (!c.hclass.empty()) os << "class = " << c.hclass << '\n';
    os << "eps = " << format_double(c.eps) << '\n';
    os << "delta = " << format_double(c.delta) << '\n';
    if (c.w_expected) os << "w_expected = " << format_double(*c.w_expected) << '\n';
    if (c.s_bound) os << "s_bound = " << format_double(*c.s_bound) << '\n';
    os << "trials = " << c.trials << '\n';
    os << "master_seed = " << c.master_seed << '\n';
    os << "workers = " << c.workers << '\n';
    if (!c.output.empty()) os << "output = " << c.output << '\n';
    os << "format = " << (c.format == OutputFormat::Csv ? "csv" : "json") << '\n';
    os << "n = " << c.n << '\n';
    if (!c.ks.empty()) {
        os << "ks = ";
        for (std::size_t i = 0; i < c.ks.size(); ++i) os << (i ? "," : "") << c.ks[i];
        os << '\n';
    }
    os << "tolerance = " << format_double(c.tolerance) << '\n';
    os << "inject_exact = " << (c.inject_exact ? "true" : "false") << '\n';
    os << "estimation = " << (c.estimation == EstimationMode::Multinomial ? "multinomial" : "streaming") << '\n';
    os << "thinning = " << (c.thinning == ThinningMode::Streaming ? "streaming" : "binomial") << '\n';
    return os.str();
}

void validate(const ExperimentConfig& c) {
    if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("eps", "must be in (0,1)");
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "must be in (0,1)");
    if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
    if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
    if (c.w_expected && !(*c.w_expected >= 1.0)) throw ConfigError("w_expected", "must be >= 1");
    if (c.s_bound && !(*c.s_bound > 0.0)) throw ConfigError("s_bound", "must be > 0");

    auto pmf_fields = [&] {
        require(c, "source", c.source);
        require(c, "target", c.target);
        check_spec("source", c.source, parse_pmf);
        check_spec("target", c.target, parse_pmf);
    };
    auto learning_fields = [&] {
        pmf_fields();
        require(c, "concept", c.truth);
        require(c, "class", c.hclass);
        check_spec("concept", c.truth, parse_hypothesis);
        check_spec("class", c.hclass, parse_class);
    };

    switch (c.kind) {
        case ExperimentKind::DistMetrics:
        case ExperimentKind::Lemma1:
            pmf_fields();
            break;
        case ExperimentKind::Theorem2:
        case ExperimentKind::Compare:
            learning_fields();
            break;
        case ExperimentKind::BoundsCheck:
            if (c.n < 1 || c.n > 16) throw ConfigError("n", "bounds-check support size must be in [1,16]");
            break;
        case ExperimentKind::Hardness:
            if (c.n < 2 || c.n % 2 != 0 || c.n > 65536) throw ConfigError("n", "must be even, in [2, 65536]");
            if (c.ks.empty()) throw ConfigError("ks", "required for kind hardness");
            if (!(c.tolerance > 0.0)) throw ConfigError("tolerance", "must be > 0");
            break;
        case ExperimentKind::Complexity:
            require(c, "class", c.hclass);
            check_spec("class", c.hclass, parse_class);
            if (!c.s_bound) throw ConfigError("s_bound", "required for kind complexity");
            if (!c.w_expected && (c.source.empty() || c.target.empty()))
                throw ConfigError("w_expected", "required unless source and target are given");
            if (!c.source.empty()) check_spec("source", c.source, parse_pmf);
            if (!c.target.empty()) check_spec("target", c.target, parse_pmf);
            break;
    }
}

}  // namespace covshift
