// runner.cpp - CSV front-ends over the library (spectrum, features, sweep, validation)

#include "polaritonix/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "polaritonix/diagnostics.hpp"
#include "polaritonix/oracle.hpp"

namespace polaritonix {

namespace {

// Commas and newlines would break the CSV layout of free-text cells.
std::string sanitize(std::string text) {
    for (char& ch : text)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return text;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& column, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw std::invalid_argument("features: column " + column + " holds '" + text + "'");
    return v;
}

std::vector<double> spectrum_grid(const RunConfig& cfg) {
    return default_grid(cfg.cavity, cfg.molecule, cfg.numerics.grid_points,
                        cfg.numerics.grid_half_span);
}

const char* sweep_column(SweepParameter p) {
    return p == SweepParameter::Detuning ? "sweep_detuning" : "sweep_k_B_T";
}

} // namespace

const char* version() { return POLARITONIX_VERSION; }

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

void write_header(std::ostream& out, const RunConfig& cfg, const std::string& command,
                  const std::vector<std::string>& extra) {
    out << "# polaritonix " << version() << '\n';
    out << "# command: " << command << '\n';
    out << "# units: " << cfg.units << '\n';
    for (const auto& [key, value] : cfg.entries) out << "# config: " << key << " = " << value << '\n';
    out << "# resolved: omega_c = " << format_number(cfg.cavity.omega_c)
        << ", omega_L = " << format_number(cfg.environment.cutoff) << '\n';
    for (const auto& line : extra) out << "# " << line << '\n';
}

void run_spectrum(const RunConfig& cfg, std::ostream& out) {
    const ResponseModel model = cfg.model();
    const auto grid = spectrum_grid(cfg);
    const Spectrum s = elastic_spectrum(model, grid);
    write_header(out, cfg, "spectrum");
    write_row(out, {"omega_d", "transmission", "absorption_re", "absorption_im"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx a = model.absorption_at(grid[i]);
        write_row(out, {format_number(grid[i]), format_number(s.values[i]),
                        format_number(a.real()), format_number(a.imag())});
    }
}

void run_absorption(const RunConfig& cfg, std::ostream& out) {
    const ResponseModel model = cfg.model();
    const auto grid = spectrum_grid(cfg);
    std::vector<std::string> extra;
    try {
        extra.push_back("fwhm = " + format_number(absorption_fwhm(model.absorption(),
                                                                  model.frequency_unit())));
    } catch (const AnalysisError& e) {
        extra.push_back(std::string("fwhm unavailable: ") + sanitize(e.what()));
    }
    std::vector<cplx> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = model.absorption_at(grid[i]); });
    write_header(out, cfg, "absorption", extra);
    write_row(out, {"omega_d", "profile", "absorption_re", "absorption_im"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        write_row(out, {format_number(grid[i]), format_number(-values[i].real()),
                        format_number(values[i].real()), format_number(values[i].imag())});
}

const std::vector<std::string>& feature_columns() {
    static const std::vector<std::string> columns = {
        "detuning",        "omega_plus",      "omega_minus",     "rabi_splitting",
        "delta_R",         "linewidth_plus",  "linewidth_minus", "intensity_ratio",
        "delta_Gamma",     "delta_Gamma_note"};
    return columns;
}

std::vector<std::string> feature_cells(const PolaritonFeatures& f) {
    return {format_number(f.detuning),        format_number(f.omega_plus),
            format_number(f.omega_minus),     format_number(f.rabi_splitting),
            format_number(f.delta_R),         format_number(f.linewidth_plus),
            format_number(f.linewidth_minus), format_number(f.intensity_ratio),
            f.delta_Gamma ? format_number(*f.delta_Gamma) : std::string{},
            sanitize(f.delta_Gamma_note)};
}

void run_features(const RunConfig& cfg, std::ostream& out) {
    const auto [lo, hi] = cfg.detuning_range();
    const PolaritonFeatures f = extract_features(cfg.model(), lo, hi);
    write_header(out, cfg, "features");
    write_row(out, feature_columns());
    write_row(out, feature_cells(f));
}

PolaritonFeatures parse_features(std::istream& in) {
    std::string line;
    std::vector<std::string> names;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (names.empty()) {
            names = split(line);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != names.size())
            throw std::invalid_argument("features: row has " + std::to_string(cells.size()) +
                                        " cells, header has " + std::to_string(names.size()));
        PolaritonFeatures f;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::string& n = names[i];
            const std::string& c = cells[i];
            if (n == "delta_Gamma_note") f.delta_Gamma_note = c;
            else if (n == "delta_Gamma") {
                if (!c.empty()) f.delta_Gamma = parse_cell(n, c);
            } else {
                double* slot = n == "detuning"          ? &f.detuning
                               : n == "omega_plus"      ? &f.omega_plus
                               : n == "omega_minus"     ? &f.omega_minus
                               : n == "rabi_splitting"  ? &f.rabi_splitting
                               : n == "delta_R"         ? &f.delta_R
                               : n == "linewidth_plus"  ? &f.linewidth_plus
                               : n == "linewidth_minus" ? &f.linewidth_minus
                               : n == "intensity_ratio" ? &f.intensity_ratio
                                                        : nullptr;
                if (slot) *slot = parse_cell(n, c);
            }
        }
        return f;
    }
    throw std::invalid_argument("features: no data row");
}

std::vector<double> SweepRange::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

SweepRange parse_range(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos)
        throw ConfigurationError("range '" + text + "' must be start:stop:count");
    SweepRange r;
    try {
        std::size_t used = 0;
        const std::string s0 = text.substr(0, a), s1 = text.substr(a + 1, b - a - 1),
                          s2 = text.substr(b + 1);
        r.start = std::stod(s0, &used);
        if (used != s0.size()) throw std::invalid_argument(s0);
        r.stop = std::stod(s1, &used);
        if (used != s1.size()) throw std::invalid_argument(s1);
        const long n = std::stol(s2, &used);
        if (used != s2.size() || n < 2) throw std::invalid_argument(s2);
        r.count = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigurationError("range '" + text + "' must be start:stop:count with count >= 2");
    }
    if (!std::isfinite(r.start) || !std::isfinite(r.stop))
        throw ConfigurationError("range '" + text + "' has non-finite bounds");
    return r;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "detuning") return SweepParameter::Detuning;
    if (name == "temperature") return SweepParameter::Temperature;
    throw ConfigurationError("unknown sweep parameter '" + name + "' (detuning or temperature)");
}

std::vector<SweepRow> sweep(const RunConfig& cfg, SweepParameter parameter, const SweepRange& range) {
    const auto values = range.values();
    const auto [lo, hi] = cfg.detuning_range();
    std::vector<SweepRow> rows(values.size());
    // The detuning sweep shares one absorption mixture; a temperature sweep
    // builds one per row.
    std::optional<ResponseModel> shared;
    if (parameter == SweepParameter::Detuning) shared.emplace(cfg.model());
    parallel_for(values.size(), [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = values[i];
        try {
            if (parameter == SweepParameter::Detuning) {
                row.features = extract_features(shared->with_detuning(row.value), lo, hi);
            } else {
                ThermalEnv env = cfg.environment;
                env.temperature = row.value;
                const ResponseModel model(cfg.cavity, cfg.molecule, env, cfg.numerics.series);
                row.features = extract_features(model, lo, hi);
            }
        } catch (const std::exception& e) {
            row.features.reset();
            row.reason = e.what();
        }
    });
    return rows;
}

void run_sweep(const RunConfig& cfg, SweepParameter parameter, const SweepRange& range,
               std::ostream& out) {
    const auto rows = sweep(cfg, parameter, range);
    write_header(out, cfg, "sweep",
                 {std::string("sweep: ") + sweep_column(parameter) + " " + format_number(range.start) +
                  ":" + format_number(range.stop) + ":" + std::to_string(range.count)});
    std::vector<std::string> names{sweep_column(parameter)};
    names.insert(names.end(), feature_columns().begin(), feature_columns().end());
    names.emplace_back("reason");
    write_row(out, names);
    for (const auto& row : rows) {
        std::vector<std::string> cells{format_number(row.value)};
        if (row.features) {
            const auto f = feature_cells(*row.features);
            cells.insert(cells.end(), f.begin(), f.end());
        } else {
            cells.resize(1 + feature_columns().size());
        }
        cells.push_back(sanitize(row.reason));
        write_row(out, cells);
    }
}

void run_baseline(const RunConfig& cfg, std::ostream& out) {
    const double kappa_m = effective_kappa_m(cfg.molecule);
    const auto grid = spectrum_grid(cfg);
    const auto r = coupled_oscillator_reference(cfg.cavity, cfg.molecule.omega_m, kappa_m, grid);
    std::vector<std::string> extra{
        "kappa_m = " + format_number(kappa_m),
        "omega_plus = " + format_number(r.omega_plus),
        "omega_minus = " + format_number(r.omega_minus),
        "resonance_plus = " + format_number(r.resonance_plus.real()) + " " +
            format_number(r.resonance_plus.imag()) + "i",
        "resonance_minus = " + format_number(r.resonance_minus.real()) + " " +
            format_number(r.resonance_minus.imag()) + "i"};
    write_header(out, cfg, "baseline", extra);
    write_row(out, {"omega_d", "transmission"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        write_row(out, {format_number(grid[i]), format_number(r.spectrum.values[i])});
}

std::vector<CheckResult> validation_checks(const RunConfig& cfg) {
    std::vector<CheckResult> checks;
    const auto& modes = cfg.molecule.modes;
    const ThermalEnv& env = cfg.environment;
    auto add = [&](std::string name, double error, double tolerance, std::string detail) {
        checks.push_back({std::move(name), error, tolerance, error <= tolerance, std::move(detail)});
    };

    const Mixture pe = total_pe(modes, env, cfg.numerics.series);
    {
        std::ostringstream d;
        d << pe.size() << " atoms; condition number " << pe.condition_number();
        add("normalization", std::abs(pe.integral() - 1.0), 1e-10, d.str());
    }

    const TimeGrid grid = TimeGrid::for_modes(modes, env);
    {
        const OracleOptions opts{CutoffScheme::Sharp,
                                 Regularizer{Regularizer::Kind::DetailedBalanceGaussian, 0.0}};
        const auto db = detailed_balance(p_numeric(modes, env, grid, opts), env.beta());
        // P(E)/P(-E) = exp(+beta E) with E > 0 the energy taken from the modes.
        const double sign_error = db.points ? std::abs(db.fitted_sign - 1.0) : 0.0;
        std::ostringstream d;
        d << db.points << " points; fitted sign " << db.fitted_sign;
        add("detailed_balance", std::max(db.max_relative_error, sign_error), 1e-2, d.str());
    }
    {
        const auto numeric = p_numeric(modes, env, grid);
        std::ostringstream d;
        d << "relative L1 on " << numeric.values.size() << " points; regularizer half-width "
          << numeric.regularizer.width;
        add("series_vs_oracle", relative_l1(periodized_mixture(pe, numeric), numeric.values), 1e-2,
            d.str());
    }
    {
        const Mixture f1 = Mixture::lorentzian(-1.5, 0.7), f2 = Mixture::lorentzian(2.0, 0.4);
        const Mixture g1 = Mixture::hilbert_lorentzian(-1.5, 0.7),
                      g2 = Mixture::hilbert_lorentzian(2.0, 0.4);
        add("convolution_f_f", convolution_rule_error(f1, f2), 1e-3, "f*f = f");
        add("convolution_f_g", convolution_rule_error(f1, g2), 1e-3, "f*g = g");
        add("convolution_g_g", convolution_rule_error(g1, g2), 1e-3, "g*g = -f");
    }
    return checks;
}

bool run_validate(const RunConfig& cfg, std::ostream& out) {
    const auto checks = validation_checks(cfg);
    bool ok = true;
    write_header(out, cfg, "validate");
    write_row(out, {"check", "error", "tolerance", "status", "detail"});
    for (const auto& c : checks) {
        ok = ok && c.passed;
        write_row(out, {c.name, format_number(c.error), format_number(c.tolerance),
                        c.passed ? "PASS" : "FAIL", sanitize(c.detail)});
    }
    return ok;
}

} // namespace polaritonix
