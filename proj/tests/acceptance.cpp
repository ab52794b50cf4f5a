// Acceptance checks, one line per criterion. With --criterion N only that one runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimer/closed_form.hpp"
#include "dimer/continuation.hpp"
#include "dimer/dimer_model.hpp"
#include "dimer/parallel.hpp"
#include "dimer/szego_constants.hpp"

using namespace dimer;

namespace {

const cplx I{0.0, 1.0};
const std::vector<double> kTSet = {0.2, 0.3, 0.4, 0.6, 0.7, 0.8};

struct Outcome {
    bool pass;
    std::string detail;
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

cplx det_t_psi_inverse(cplx t, int n) {
    const auto inv = spectral::fourier_coefficients(spectral::pointwise_inverse(model::symbol_psi(t)), 4096, 1023);
    return spectral::log_determinant(spectral::toeplitz_matrix(inv, n)).value();
}

Outcome headline() {
    const auto start = std::chrono::steady_clock::now();
    const cplx p = closed::correlation_limit(1.0);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const bool digits = std::round(p.real() * 1e4) == 1494.0 && p.imag() == 0.0;
    return {digits && ms < 1.0, fmt("P(1) = %.12f, %.4f ms", p.real(), ms)};
}

Outcome appendix_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> ts = {0.3, 0.5, 0.7};
    const auto worst_per_t = parallel_map<double>(ts.size(), [&](std::size_t i) {
        DimerParams p;
        p.t = ts[i];
        const auto c = model::dimer_coefficients(p, -15, 16);
        const auto tab = spectral::fourier_coefficients(model::symbol_phi(p), p.spectral.grid_size, p.spectral.order);
        double worst = 0.0;
        for (int n : {2, 4, 8, 16}) {
            const cplx dm = spectral::log_determinant(model::dimer_matrix(c, n)).value();
            const cplx dt = spectral::log_determinant(spectral::toeplitz_matrix(tab, n)).value();
            worst = std::max(worst, std::abs(dm - dt) / std::abs(dt));
        }
        return worst;
    });
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double worst = *std::max_element(worst_per_t.begin(), worst_per_t.end());
    return {worst <= 1e-8 && s < 30.0, fmt("max relative gap %.3e, %.2f s", worst, s)};
}

Outcome three_way() {
    const auto start = std::chrono::steady_clock::now();
    szego::TruncationConfig cfg;
    cfg.op_order = 256;
    const auto gaps = parallel_map<double>(kTSet.size(), [&](std::size_t i) {
        const double t = kTSet[i];
        DimerParams p;
        p.t = t;
        const cplx op = szego::szego_E_operator(model::symbol_phi(p), cfg).value;
        const cplx red = szego::reduced_E(t, cfg);
        const cplx cf = closed::e_phi(t);
        return std::max({rel(op, cf), rel(red, cf), rel(op, red)});
    });
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double worst = *std::max_element(gaps.begin(), gaps.end());
    return {worst <= 1e-6 && s < 60.0, fmt("max pairwise relative gap %.3e, %.2f s", worst, s)};
}

Outcome lambda_identity() {
    double worst = 0.0;
    for (double t : kTSet) {
        const cplx lam = closed::lambda_value(t);
        worst = std::max(worst, rel(lam * lam, det_t_psi_inverse(t, 3)));
    }
    return {worst <= 1e-8, fmt("max relative gap %.3e", worst)};
}

Outcome hankel_traces() {
    const double t = 0.3;
    const int order = 2048;
    const int grid = spectral::grid_for_order(order, 4096);
    const auto a1 = spectral::fourier_coefficients(spectral::MatrixSymbol::from_scalar(szego::alpha1_symbol(t)), grid, order);
    const auto a2 = spectral::fourier_coefficients(spectral::MatrixSymbol::from_scalar(szego::alpha2_symbol(t)), grid, order);
    const auto r = closed::spectral_roots(t);
    const cplx mixed = -std::log((1.0 - t * t * r.xi1) * (1.0 - t * t * r.xi2));
    const cplx square = -2.0 * std::log((1.0 - r.xi1 * r.xi1) * (1.0 - r.xi2 * r.xi2) * std::pow(1.0 - r.xi1 * r.xi2, 2));
    const double e1 = std::abs(szego::hankel_trace(a1, a2, order).value - mixed);
    const double e2 = std::abs(szego::hankel_trace(a2, a2, order).value - square);
    return {e1 <= 1e-9 && e2 <= 1e-9, fmt("mixed trace error %.3e, alpha2 trace error %.3e", e1, e2)};
}

Outcome bocg() {
    const double t = 0.4;
    szego::TruncationConfig cfg;
    const auto psi = szego::psi_table(t, cfg);
    const auto sym = model::symbol_psi(t);
    const cplx e = szego::szego_E_operator(sym, cfg).value;
    const cplx g = spectral::geometric_mean(sym, 4096);
    double identity = 0.0;
    for (int n : {3, 5, 8})
        identity = std::max(identity, rel(szego::bocg_residual(psi, n, cfg) * e / std::pow(g, n), det_t_psi_inverse(t, n)));
    double tail = 0.0;
    for (int n : {12, 16, 24, 32}) tail = std::max(tail, std::abs(szego::bocg_residual(psi, n, cfg) - 1.0));
    return {identity <= 1e-8 && tail <= 1e-8, fmt("identity gap %.3e, |residual - 1| for n >= 12 %.3e", identity, tail)};
}

Outcome exp_rep() {
    double worst = 0.0;
    for (double t : {0.3, 0.7}) {
        DimerParams p;
        p.t = t;
        const auto rep = szego::exp_representation(p);
        const auto phi = model::symbol_phi(p);
        for (int j = 0; j < 256; ++j) {
            const double x = -kPi + 2.0 * kPi * j / 256;
            ComplexMatrix target = -phi(x);
            target(0, 1) = -target(0, 1);
            target(1, 0) = -target(1, 0);
            worst = std::max(worst, (rep.reconstructed(x) - target).cwiseAbs().maxCoeff());
        }
    }
    return {worst <= 1e-9, fmt("max pointwise error %.3e", worst)};
}

Outcome continuation_identity() {
    const std::vector<cplx> ts = {0.6, 1.0, 1.2, cplx(0.8, 0.3)};
    const auto gaps = parallel_map<double>(ts.size(), [&](std::size_t i) {
        double worst = 0.0;
        for (int n : {4, 8, 16})
            worst = std::max(worst, continuation::theta_decomposition(ts[i], n, {}, INFINITY).relative_gap);
        return worst;
    });
    const double worst = *std::max_element(gaps.begin(), gaps.end());
    return {worst <= 1e-9, fmt("max relative gap %.3e", worst)};
}

Outcome t1_convergence() {
    const auto start = std::chrono::steady_clock::now();
    const auto scan = continuation::limit_scan(1.0, {16, 32, 64, 128, 256});
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const cplx target = closed::correlation_limit(1.0);
    std::string detail = "errors vs P(1) = 0.149429245361:";
    std::vector<double> errs;
    for (const auto& row : scan.rows) {
        errs.push_back(std::abs(row.correlation - target));
        detail += fmt(" n=%.0f %.3e", row.n, errs.back());
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < errs.size(); ++i) decreasing = decreasing && errs[i] < errs[i - 1];
    // the 1e-2 bound on the last error is recorded, not gated
    detail += std::string("; final <= 1e-2: ") + (errs.back() <= 1e-2 ? "yes" : "no") + fmt("; %.1f s", s);
    return {decreasing && s < 300.0, detail};
}

Outcome root_suite() {
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> re(0.05, 1.5), im(-0.5, 0.5);
    double sums = 0.0, quartic = 0.0, product = 0.0, modulus = 0.0;
    int count = 0;
    while (count < 50) {
        const cplx t(re(rng), im(rng));
        if (std::abs(t - 0.5) < 1e-3) continue;
        ++count;
        const auto r = closed::spectral_roots(t);
        modulus = std::max({modulus, std::abs(r.xi1), std::abs(r.xi2)});
        const cplx s1 = r.xi1 + 1.0 / r.xi1, s2 = r.xi2 + 1.0 / r.xi2;
        sums = std::max(sums, std::abs(s1 - (4.0 + 2.0 * r.mu)) / std::max(1.0, std::abs(s1)));
        sums = std::max(sums, std::abs(s2 - (4.0 - 2.0 * r.mu)) / std::max(1.0, std::abs(s2)));
        for (int j = 0; j < 16; ++j)
            quartic = std::max(quartic, closed::factorization_residual(r, std::exp(I * (2.0 * kPi * j / 16))));
        const cplx prod = (r.xi1 - 1.0) * (1.0 / r.xi1 - 1.0) * (r.xi2 - 1.0) * (1.0 / r.xi2 - 1.0);
        product = std::max(product, std::abs(prod - 16.0 * t * t));
    }
    const bool pass = modulus < 1.0 && sums <= 1e-12 && quartic <= 1e-10 && product <= 1e-10;
    return {pass, fmt("max |xi| %.6f, sum identity %.3e, quartic %.3e", modulus, sums, quartic) +
                      fmt(", product %.3e", product)};
}

Outcome scalar_sanity() {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto p = szego::random_laurent(20240601, i);
        const cplx w = szego::widom_banded_E(p.table(8), p.plus_degree(), 4096);
        const cplx s = szego::scalar_E_series(p.log_table(2048), 2048).value;
        worst = std::max(worst, rel(w, s));
    }
    return {worst <= 1e-9, fmt("max relative gap %.3e over 20 polynomials", worst)};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {"headline correlation at t=1", headline},
    {"dimer matrix vs block Toeplitz", appendix_equivalence},
    {"three-way E agreement", three_way},
    {"Lambda squared vs det T_3", lambda_identity},
    {"Hankel trace closed forms", hankel_traces},
    {"BOCG residual", bocg},
    {"exponential representation", exp_rep},
    {"continuation identity", continuation_identity},
    {"t=1 convergence", t1_convergence},
    {"root invariants", root_suite},
    {"scalar Widom vs series", scalar_sanity},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (only && id != only) continue;
        Outcome o;
        try {
            o = kCriteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        std::printf("criterion %2d %s: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", kCriteria[i].name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
