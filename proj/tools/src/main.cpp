#include "commands.hpp"

#include <nhent/errors.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <string>

namespace {

constexpr int kValidation = 1;
constexpr int kNumerical = 2;

std::pair<std::string, double> parse_tolerance(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw nhent::ConfigError("--tolerance expects NAME=VALUE, got '" + s + "'");
    try {
        std::size_t pos = 0;
        const std::string value = s.substr(eq + 1);
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return {s.substr(0, eq), v};
    } catch (const std::logic_error&) {
        throw nhent::ConfigError("--tolerance " + s + ": value is not a number");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement diagnostics for non-Hermitian free-fermion lattices"};
    app.require_subcommand(1);

    cli::Options opt;
    std::vector<std::string> tolerances;
    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config, "JSON run configuration");
        if (needs_config) c->required()->check(CLI::ExistingFile);
        else c->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (default: current directory)");
        sub->add_option("--workers", opt.workers, "worker threads for independent points")->check(CLI::PositiveNumber);
        sub->add_option("--tolerance", tolerances, "override a tolerance, NAME=VALUE (repeatable)");
    };

    std::function<int(const cli::Options&)> run;
    auto* models = app.add_subcommand("model-list", "list model families, parameters and defaults");
    models->add_option("--out", opt.out, "also write models.json to this directory");
    models->callback([&] { run = cli::cmd_model_list; });

    auto* ent = app.add_subcommand("entanglement", "entropies and spectra over partitions and parameter sweeps");
    common(ent, true);
    ent->callback([&] { run = cli::cmd_entanglement; });

    auto* fit = app.add_subcommand("fit", "central-charge fit of entropy series");
    common(fit, false);
    fit->add_option("series", opt.series, "series CSV files with L_A, re_S, im_S columns")->check(CLI::ExistingFile);
    fit->add_option("--geometry", opt.geometry, "chord or open_log");
    fit->add_option("--total-length", opt.total_length, "system length L for the chord form");
    fit->add_option("--la-min", opt.la_min, "smallest L_A in the fit window");
    fit->add_option("--la-max", opt.la_max, "largest L_A in the fit window");
    fit->callback([&] { run = cli::cmd_fit; });

    auto* dyn = app.add_subcommand("dynamics", "normalized no-jump evolution of a Gaussian state");
    common(dyn, true);
    dyn->callback([&] { run = cli::cmd_dynamics; });

    auto* dual = app.add_subcommand("duality", "RPR vs PRP spectrum comparison");
    common(dual, true);
    dual->callback([&] { run = cli::cmd_duality; });

    auto* orc = app.add_subcommand("oracle", "many-body oracle cross-check (default suite without --config)");
    common(orc, false);
    orc->callback([&] { run = cli::cmd_oracle; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        for (const auto& t : tolerances) opt.tolerances.push_back(parse_tolerance(t));
        return run(opt);
    } catch (const nhent::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    }
}
