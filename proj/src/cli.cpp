#include "dimer/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "dimer/closed_form.hpp"
#include "dimer/continuation.hpp"
#include "dimer/dimer_model.hpp"
#include "dimer/parallel.hpp"
#include "dimer/report.hpp"
#include "dimer/szego_constants.hpp"

namespace dimer::cli {

using report::CheckRow;
using report::Report;
using report::ValueRow;

cplx parse_complex(const std::string& text) {
    auto bad = [&]() -> cplx { fail(ErrorCode::InvalidArgument, "cannot parse complex number '" + text + "'"); };
    if (text.empty()) return bad();
    const char* s = text.c_str();
    char* end = nullptr;
    const double first = std::strtod(s, &end);
    if (end == s) return bad();
    if (*end == '\0') return {first, 0.0};
    if ((*end == 'i' || *end == 'j') && end[1] == '\0') return {0.0, first};
    if (*end != '+' && *end != '-') return bad();
    const char* rest = end;
    const double second = std::strtod(rest, &end);
    if (end == rest || (*end != 'i' && *end != 'j') || end[1] != '\0') return bad();
    return {first, second};
}

namespace {

struct Options {
    std::vector<std::string> t_text;
    std::vector<int> n;
    int quad_grid = 256;
    int grid_size = 4096;
    int order = 512;
    int op_order = 256;
    int series_order = 2048;
    double tolerance = 1e-10;
    std::string output = "-";
    std::string format = "csv";
    int precision = 12;
    std::uint64_t seed = 20240601;

    double t_start = 0.25;
    double t_stop = 1.0;
    int t_count = 0;
    double t_imag = 0.0;
    bool root_checks = false;

    std::string identity = "all";

    std::vector<cplx> t;

    SpectralConfig spectral() const { return {grid_size, order, spectral::kDefaultTailTolerance}; }
    szego::TruncationConfig truncation() const { return {op_order, series_order, tolerance, 0}; }
    DimerParams params(cplx tv) const { return {tv, quad_grid, spectral()}; }
};

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void reject(const std::string& what) { fail(ErrorCode::ParameterOutOfRange, what); }

void validate(Options& o) {
    for (const auto& s : o.t_text) {
        const cplx v = parse_complex(s);
        if (!(v.real() > 0.0) || !std::isfinite(v.imag())) reject("t=" + s + " is outside Re(t) > 0");
        o.t.push_back(v);
    }
    for (int v : o.n)
        if (v < 1) reject("n must be >= 1");
    for (int v : o.n)
        if (v > o.order) reject("n=" + std::to_string(v) + " exceeds --order " + std::to_string(o.order));
    if (o.quad_grid < 8) reject("--quad-grid must be >= 8");
    if (o.order < 1) reject("--order must be >= 1");
    if (!is_power_of_two(o.grid_size) || o.grid_size < 4 * o.order + 4)
        reject("--grid-size must be a power of two >= 4*order+4");
    if (o.op_order < 1) reject("--op-order must be >= 1");
    if (o.series_order < 1) reject("--series-order must be >= 1");
    if (!(o.tolerance > 0.0)) reject("--tolerance must be positive");
    if (o.t_count < 0) reject("--t-count must be >= 0");
    if (o.t_count > 0) {
        const cplx a(o.t_start, o.t_imag), b(o.t_stop, o.t_imag);
        if (!(a.real() > 0.0) || !(b.real() > 0.0)) reject("sweep grid leaves Re(t) > 0");
    }
}

bool real_unit(cplx t) { return t.imag() == 0.0 && t.real() > 0.0 && t.real() < 1.0; }

std::string error_status(const Error& e) { return "error: " + std::string(e.what()); }

// P_n from det M_n for real 0 < t < 1, otherwise from det B-hat.
cplx finite_correlation(const Options& o, cplx t, int n) {
    if (real_unit(t)) return model::correlation_finite(o.params(t), n);
    const auto ld = spectral::log_determinant(continuation::b_hat(t, n, o.spectral()));
    if (ld.is_singular) fail(ErrorCode::SingularDeterminant, "det B-hat is numerically singular");
    return 0.5 * std::exp(0.5 * ld.log_value());
}

// ---------------------------------------------------------------- commands

Report run_correlation(const Options& o) {
    if (o.t.empty()) reject("correlation needs --t");
    Report r{"correlation", {}, {}, {}};
    for (cplx t : o.t) {
        const cplx limit = closed::correlation_limit(t);
        r.rows.push_back({t, std::nullopt, limit, limit, 0.0, "closed_form"});
        for (int n : o.n) {
            const cplx p = finite_correlation(o, t, n);
            r.rows.push_back({t, n, p, limit, std::abs(p - limit), "ok"});
        }
    }
    return r;
}

std::string root_check_status(cplx t) {
    if (std::abs(t - 0.5) < 1e-3) return "skipped: degenerate";
    const auto roots = closed::spectral_roots(t);
    const cplx g = 1.0 / (16.0 * roots.xi1 * roots.xi2);
    const cplx lam = closed::lambda_value(t);
    const cplx chain = closed::prefactor(t) * lam * lam * g * g * g;
    const cplx e = closed::e_phi(t);
    return std::abs(chain - e) <= 1e-8 * std::abs(e) ? "ok" : "failed: root identity";
}

Report run_sweep(const Options& o) {
    Report r{"sweep", {}, {}, {}};
    std::vector<cplx> grid;
    for (int k = 0; k < o.t_count; ++k) {
        const double re = o.t_count == 1 ? o.t_start : o.t_start + (o.t_stop - o.t_start) * k / (o.t_count - 1);
        grid.emplace_back(re, o.t_imag);
    }
    const int n_max = o.n.empty() ? 0 : *std::max_element(o.n.begin(), o.n.end());
    r.rows = parallel_map<ValueRow>(grid.size(), [&](std::size_t i) {
        const cplx t = grid[i];
        ValueRow row{t, std::nullopt, std::nullopt, std::nullopt, std::nullopt, "ok"};
        try {
            const cplx limit = closed::correlation_limit(t);
            row.target = limit;
            if (n_max > 0) {
                row.n = n_max;
                row.value = finite_correlation(o, t, n_max);
            } else {
                row.value = limit;
            }
            row.abs_error = std::abs(*row.value - limit);
            if (o.root_checks) row.status = root_check_status(t);
        } catch (const Error& e) {
            row.status = error_status(e);
        }
        return row;
    });
    return r;
}

Report run_convergence(const Options& o) {
    if (o.t.empty()) reject("convergence needs --t");
    std::vector<int> ns = o.n.empty() ? std::vector<int>{16, 32, 64, 128, 256} : o.n;
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) reject("convergence needs an increasing --n list");
    for (int n : ns)
        if (n > o.order) reject("n=" + std::to_string(n) + " exceeds --order");
    Report r{"convergence", {}, {}, {}};
    for (cplx t : o.t) {
        const auto scan = continuation::limit_scan(t, ns, o.spectral());
        for (std::size_t i = 0; i < scan.rows.size(); ++i) {
            const auto& row = scan.rows[i];
            const bool grew = i > 0 && row.det_error > scan.rows[i - 1].det_error;
            r.rows.push_back({t, row.n, row.det, scan.target, row.det_error, grew ? "error grew" : "ok"});
        }
    }
    return r;
}

// ---------------------------------------------------------------- verify

struct Identity {
    std::string name;
    cplx default_t;
    int default_n;  // 0: not used
    double threshold;
    bool needs_real_unit;
    bool root_based;
    std::function<double(const Options&, cplx, int)> residual;
};

double rel_gap(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

const std::vector<Identity>& identities() {
    static const std::vector<Identity> list = {
        {"appendix-equivalence", 0.5, 8, 1e-8, true, false,
         [](const Options& o, cplx t, int n) {
             const auto p = o.params(t);
             const auto lm = spectral::log_determinant(model::dimer_matrix(p, n));
             const auto tab = spectral::fourier_coefficients(model::symbol_phi(p), o.grid_size, o.order);
             const auto lt = spectral::log_determinant(spectral::toeplitz_matrix(tab, n));
             return std::abs(std::exp(lm.log_value() - lt.log_value()) - 1.0);
         }},
        {"appendix-symbols", 0.7, 0, 1e-9, true, false,
         [](const Options& o, cplx t, int) {
             const auto s = model::appendix_symbols(o.params(t));
             double worst = 0.0;
             for (int j = 0; j < 32; ++j) {
                 const double x = -kPi + 2.0 * kPi * j / 32;
                 worst = std::max(worst, std::abs(s.s_plus_t_quadrature(x) - s.s_plus_t_closed(x)));
                 worst = std::max(worst, std::abs(s.v_quadrature(x) - s.v_closed(x)));
             }
             return worst;
         }},
        {"exp-rep", 0.7, 0, 1e-9, true, false,
         [](const Options& o, cplx t, int) {
             const auto rep = szego::exp_representation(o.params(t));
             const auto phi = model::symbol_phi(o.params(t));
             double worst = 0.0;
             for (int j = 0; j < 256; ++j) {
                 const double x = -kPi + 2.0 * kPi * j / 256;
                 ComplexMatrix target = -phi(x);
                 target(0, 1) = -target(0, 1);
                 target(1, 0) = -target(1, 0);
                 worst = std::max(worst, (rep.reconstructed(x) - target).cwiseAbs().maxCoeff());
             }
             return worst;
         }},
        {"three-way", 0.3, 0, 1e-6, true, false,
         [](const Options& o, cplx t, int) {
             const cplx op = szego::szego_E_operator(model::symbol_phi(o.params(t)), o.truncation()).value;
             const cplx red = szego::reduced_E(t, o.truncation());
             const cplx cf = closed::e_phi(t);
             return std::max({rel_gap(op, cf), rel_gap(red, cf), rel_gap(op, red)});
         }},
        {"prefactor", 0.3, 0, 1e-8, true, false,
         [](const Options& o, cplx t, int) {
             return rel_gap(szego::sigma_correction(t, o.truncation()), closed::prefactor(t));
         }},
        {"widom", 0.3, 0, 1e-8, false, true,
         [](const Options& o, cplx t, int) {
             const cplx w = szego::widom_banded_E(szego::psi_table(t, o.truncation()), 3, o.grid_size);
             const auto roots = closed::spectral_roots(t);
             const cplx g = 1.0 / (16.0 * roots.xi1 * roots.xi2);
             const cplx lam = closed::lambda_value(t);
             return rel_gap(w, g * g * g * lam * lam);
         }},
        {"lambda", 0.3, 0, 1e-8, false, true,
         [](const Options& o, cplx t, int) {
             const auto inv = spectral::fourier_coefficients(spectral::pointwise_inverse(model::symbol_psi(t)),
                                                             o.grid_size, o.grid_size / 4 - 1);
             const cplx d3 = spectral::log_determinant(spectral::toeplitz_matrix(inv, 3)).value();
             const cplx lam = closed::lambda_value(t);
             return rel_gap(lam * lam, d3);
         }},
        {"bocg", 0.4, 3, 1e-8, false, false,
         [](const Options& o, cplx t, int n) {
             const auto cfg = o.truncation();
             const auto psi = szego::psi_table(t, cfg);
             const auto sym = model::symbol_psi(t);
             const cplx res = szego::bocg_residual(psi, n, cfg);
             const cplx e = szego::szego_E_operator(sym, cfg).value;
             const cplx g = spectral::geometric_mean(sym, o.grid_size);
             const auto inv =
                 spectral::fourier_coefficients(spectral::pointwise_inverse(sym), o.grid_size, o.grid_size / 4 - 1);
             const cplx lhs = spectral::log_determinant(spectral::toeplitz_matrix(inv, n)).value();
             return rel_gap(res * e / std::pow(g, n), lhs);
         }},
        {"continuation", 1.0, 8, 1e-9, false, false,
         [](const Options& o, cplx t, int n) {
             return continuation::theta_decomposition(t, n, o.spectral(), std::numeric_limits<double>::infinity())
                 .relative_gap;
         }},
        {"scalar-widom", 0.0, 0, 1e-9, false, false,
         [](const Options& o, cplx, int) {
             double worst = 0.0;
             for (int i = 0; i < 20; ++i) {
                 const auto p = szego::random_laurent(o.seed, i);
                 const cplx w = szego::widom_banded_E(p.table(8), p.plus_degree(), 4096);
                 const cplx s = szego::scalar_E_series(p.log_table(o.series_order), o.series_order).value;
                 worst = std::max(worst, rel_gap(w, s));
             }
             return worst;
         }},
    };
    return list;
}

CheckRow run_identity(const Identity& id, const Options& o, cplx t, int n) {
    CheckRow row{id.name, t, id.default_n ? std::optional<int>(n) : std::nullopt, 0.0, id.threshold, true, "ok"};
    if (id.name == "scalar-widom") row.t = 0.0;
    if (id.needs_real_unit && !real_unit(t)) {
        row.status = "skipped: needs real 0 < t < 1";
        return row;
    }
    if (id.root_based && std::abs(t - 0.5) < 1e-3) {
        row.status = "skipped: degenerate";
        return row;
    }
    try {
        row.residual = id.residual(o, t, n);
        row.pass = row.residual <= id.threshold;
        if (!row.pass) row.status = "failed";
    } catch (const Error& e) {
        row.residual = std::numeric_limits<double>::quiet_NaN();
        row.pass = false;
        row.status = error_status(e);
    }
    return row;
}

Report run_verify(const Options& o) {
    Report r{"verify", {}, {}, {}};
    for (const auto& id : identities()) {
        if (o.identity != "all" && o.identity != id.name) continue;
        const std::vector<cplx> ts = (o.t.empty() || id.name == "scalar-widom") ? std::vector<cplx>{id.default_t} : o.t;
        const std::vector<int> ns = (o.n.empty() || !id.default_n) ? std::vector<int>{id.default_n} : o.n;
        for (cplx t : ts)
            for (int n : ns) r.checks.push_back(run_identity(id, o, t, n));
    }
    return r;
}

std::vector<std::string> identity_names() {
    std::vector<std::string> names{"all"};
    for (const auto& id : identities()) names.push_back(id.name);
    return names;
}

bool wants_json(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--format=json") return true;
        if (a == "--format" && i + 1 < argc && std::string(argv[i + 1]) == "json") return true;
    }
    return false;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Monomer-monomer correlation of the dimer model from block Toeplitz determinants.\n"
                 "Complex t is written as 0.8+0.3i. DIMER_THREADS overrides the worker count."};
    app.set_config("--config", "", "INI/TOML file with option values; sweep and verify options go under [sweep] / [verify]");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--t", o.t_text, "parameter t (repeatable), e.g. 1, 0.3, 0.8+0.3i");
    app.add_option("--n", o.n, "matrix size(s); comma separated or repeated")->delimiter(',');
    app.add_option("--quad-grid", o.quad_grid, "points per axis for the dimer coefficient quadrature")
        ->capture_default_str();
    app.add_option("--grid-size", o.grid_size, "sampling grid M for Fourier coefficients")->capture_default_str();
    app.add_option("--order", o.order, "Fourier truncation order K")->capture_default_str();
    app.add_option("--op-order", o.op_order, "truncation size of semi-infinite operators")->capture_default_str();
    app.add_option("--series-order", o.series_order, "terms in trace series")->capture_default_str();
    app.add_option("--tolerance", o.tolerance, "truncation tail tolerance")->capture_default_str();
    app.add_option("-o,--output", o.output, "output file, - for stdout")->capture_default_str();
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--precision", o.precision, "significant digits in CSV")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
    app.add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();

    app.add_subcommand("correlation", "closed-form limit and finite-n values of P");
    auto* sweep = app.add_subcommand("sweep", "P over a grid of t values");
    sweep->add_option("--t-start", o.t_start, "first real part")->capture_default_str();
    sweep->add_option("--t-stop", o.t_stop, "last real part")->capture_default_str();
    sweep->add_option("--t-count", o.t_count, "number of grid points (0: empty sweep)")->capture_default_str();
    sweep->add_option("--t-imag", o.t_imag, "imaginary part shared by the grid")->capture_default_str();
    sweep->add_flag("--root-checks", o.root_checks, "also check the root-based identity chain per row");
    app.add_subcommand("convergence", "det B-hat_n against the limit E_t");
    auto* verify = app.add_subcommand("verify", "run identity checks");
    verify->add_option("--identity", o.identity, "identity name or all")
        ->check(CLI::IsMember(identity_names()))
        ->capture_default_str();

    const bool json_errors = wants_json(argc, argv);
    auto emit_error = [&](const std::string& code, const std::string& message, int exit_code) {
        err << message << '\n';
        if (json_errors) {
            Report r{"error", {}, {}, report::ErrorInfo{code, message, exit_code}};
            out << report::render_json(r);
        }
        return exit_code;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return emit_error("ConfigRejected", e.what(), kExitConfig);
    }

    Report rep;
    try {
        validate(o);
        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "correlation") rep = run_correlation(o);
        else if (command == "sweep") rep = run_sweep(o);
        else if (command == "convergence") rep = run_convergence(o);
        else rep = run_verify(o);
    } catch (const Error& e) {
        const int code = is_parameter_error(e.code()) ? kExitConfig : kExitNumerical;
        return emit_error(std::string(to_string(e.code())), e.what(), code);
    } catch (const std::exception& e) {
        return emit_error("Internal", e.what(), kExitNumerical);
    }

    int exit_code = kExitOk;
    for (const auto& c : rep.checks) {
        if (!c.pass) {
            rep.error = report::ErrorInfo{"IdentityFailed", "identity " + c.identity + " failed: " + c.status,
                                          kExitNumerical};
            exit_code = kExitNumerical;
            break;
        }
    }
    for (const auto& row : rep.rows) {
        if (row.status.rfind("error", 0) == 0 || row.status.rfind("failed", 0) == 0) {
            rep.error = report::ErrorInfo{"RowFailed", "row at t=" + std::to_string(row.t.real()) + "+" +
                                                           std::to_string(row.t.imag()) + "i: " + row.status,
                                          kExitNumerical};
            exit_code = kExitNumerical;
            break;
        }
    }
    if (rep.error) err << rep.error->message << '\n';

    const std::string text = o.format == "json" ? report::render_json(rep) : report::render_csv(rep, o.precision);
    if (o.output == "-") {
        out << text;
    } else {
        std::ofstream f(o.output);
        if (!f) {
            err << "cannot open " << o.output << " for writing\n";
            return kExitConfig;
        }
        f << text;
    }
    return exit_code;
}

}  // namespace dimer::cli
