// polaritonix.cpp - command-line front-end: spectrum, absorption, features, sweep, baseline, validate
//
// Exit codes: 0 ok, 2 configuration, 3 I/O, 4 ambiguous physics (peak
// extraction failed), 5 validation failure, 1 anything else.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "polaritonix/runner.hpp"

namespace {

using namespace polaritonix;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kIo = 3, kAmbiguous = 4, kValidation = 5 };

struct Options {
    std::string config;
    std::string out;
    std::string param;
    std::string range;
    long grid_points{0};
    double grid_span{0.0};
    double tolerance{0.0};
};

RunConfig load(const Options& o, bool require_modes) {
    ConfigEntries entries = read_entries_file(o.config);
    if (o.grid_points > 0) entries["numerics.grid_points"] = std::to_string(o.grid_points);
    if (o.grid_span > 0.0) entries["numerics.grid_half_span"] = format_number(o.grid_span);
    if (o.tolerance > 0.0) entries["numerics.series_tolerance"] = format_number(o.tolerance);
    return build_config(entries, require_modes);
}

// Output goes to --out, then output.<command> from the config, then stdout.
// The file is opened before the computation so an unwritable path fails fast,
// and written only after the computation succeeded.
int emit(const RunConfig& cfg, const Options& o, const std::string& command,
         const std::function<int(std::ostream&)>& body) {
    const std::string path = o.out.empty() ? cfg.output_path(command) : o.out;
    std::ofstream file;
    if (!path.empty() && path != "-") {
        file.open(path);
        if (!file) throw IoError("cannot write " + path);
    }
    std::ostringstream buffer;
    const int code = body(buffer);
    std::ostream& sink = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    sink << buffer.str();
    sink.flush();
    if (!sink) throw IoError("write failed for " + (path.empty() ? std::string("stdout") : path));
    return code;
}

int dispatch(const std::string& command, const Options& o) {
    const RunConfig cfg = load(o, command != "baseline");
    return emit(cfg, o, command, [&](std::ostream& out) {
        if (command == "spectrum") run_spectrum(cfg, out);
        else if (command == "absorption") run_absorption(cfg, out);
        else if (command == "features") run_features(cfg, out);
        else if (command == "baseline") run_baseline(cfg, out);
        else if (command == "sweep")
            run_sweep(cfg, parse_sweep_parameter(o.param), parse_range(o.range), out);
        else if (command == "validate") {
            const bool ok = run_validate(cfg, out);
            if (!ok) std::cerr << "validation failed; see the report\n";
            return ok ? kOk : kValidation;
        }
        return kOk;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polariton spectra of molecules with Brownian-damped vibrations"};
    app.set_version_flag("--version", std::string(polaritonix::version()));
    app.require_subcommand(1);

    Options o;
    const std::pair<const char*, const char*> commands[] = {
        {"spectrum", "transmission and absorption function on a frequency grid"},
        {"absorption", "bare-molecule absorption profile and its FWHM"},
        {"features", "Rabi splitting, peak positions, linewidths and asymmetries"},
        {"sweep", "features over a detuning or temperature range"},
        {"baseline", "coupled-oscillator transmission with a Lorentzian molecule"},
        {"validate", "closed form against the numerical oracles"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "parameter file")->required();
        sub->add_option("--out", o.out, "output path ('-' for stdout)");
        sub->add_option("--grid-points", o.grid_points, "frequency grid points");
        sub->add_option("--grid-span", o.grid_span, "frequency grid half-span");
        sub->add_option("--tolerance", o.tolerance, "series truncation tolerance");
        if (std::string(name) == "sweep") {
            sub->add_option("--param", o.param, "detuning or temperature")->required();
            sub->add_option("--range", o.range, "start:stop:count")->required();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, o);
    } catch (const polaritonix::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const polaritonix::AmbiguousSplitting& e) {
        std::cerr << "ambiguous splitting (" << e.peak_count() << " peaks): " << e.what() << '\n';
        return kAmbiguous;
    } catch (const polaritonix::AnalysisError& e) {
        std::cerr << "peak analysis failed: " << e.what() << '\n';
        return kAmbiguous;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}
