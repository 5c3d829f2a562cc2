// covshift: run a covariate-shift experiment from a config file.
//
//   covshift <kind> --config <file> [--seed N] [--trials N] [--workers N]
//            [--out <path>] [--format csv|json] [--strict]
//
// Rows go to --out (or stdout); the JSON summary goes to stderr and, with
// --out, to <path>.summary.json. Exit codes: 0 ok, 1 acceptance failure
// under --strict, 2 configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "covshift/config.hpp"
#include "covshift/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitConfig = 2;

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariate-shift rejection sampling experiments"};

    std::string kind_text;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> workers;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    bool strict = false;

    app.add_option("kind", kind_text,
                   "dist-metrics | bounds-check | lemma1 | theorem2 | hardness | compare | complexity")
        ->required();
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "number of trials");
    app.add_option("--workers", workers, "worker threads");
    app.add_option("--out", out_path, "row output path");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--strict", strict, "exit 1 when the summary does not pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        auto config = covshift::load_config(config_path);
        const auto kind = covshift::parse_kind(kind_text);
        if (!kind) throw covshift::ConfigError("kind", "unknown experiment kind '" + kind_text + "'");
        // The command line kind takes precedence over one named in the file.
        config.kind = *kind;
        if (seed) config.master_seed = *seed;
        if (trials) config.trials = *trials;
        if (workers) config.workers = *workers;
        if (out_path) config.output = *out_path;
        if (format) config.format = *format == "json" ? covshift::OutputFormat::Json : covshift::OutputFormat::Csv;

        const auto result = covshift::run(config);
        const auto rows = config.format == covshift::OutputFormat::Json ? covshift::to_json(result)
                                                                        : covshift::to_csv(result);
        const auto summary = covshift::summary_json(result);
        if (config.output.empty()) {
            std::cout << rows;
        } else {
            if (!write_file(config.output, rows) || !write_file(config.output + ".summary.json", summary)) {
                std::cerr << "error: cannot write " << config.output << '\n';
                return kExitConfig;
            }
        }
        std::cerr << summary;
        return (strict && !result.summary.passed) ? kExitAcceptance : kExitOk;
    } catch (const covshift::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const covshift::WeightRatioViolation& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}
