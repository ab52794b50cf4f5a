#include <doctest.h>

#include <cmath>

#include "dimer/closed_form.hpp"
#include "dimer/szego_constants.hpp"
#include "oracles.hpp"

using namespace dimer;
using spectral::FourierTable;
using spectral::MatrixSymbol;
using spectral::ScalarSymbol;

namespace {

const cplx I{0.0, 1.0};

MatrixSymbol scalar(std::function<cplx(double)> f) { return MatrixSymbol::from_scalar(ScalarSymbol{std::move(f)}); }

FourierTable scalar_table(int order, std::function<cplx(int)> coeff) {
    FourierTable tab(1, order);
    for (int k = -order; k <= order; ++k) tab[k](0, 0) = coeff(k);
    return tab;
}

FourierTable log_two_sided(double g, double d, int order) {
    return scalar_table(order, [=](int k) -> cplx {
        if (k > 0) return -std::pow(g, k) / k;
        if (k < 0) return -std::pow(d, -k) / (-k);
        return 0.0;
    });
}

DimerParams at(double t) {
    DimerParams p;
    p.t = t;
    return p;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

szego::TruncationConfig small_cfg() {
    szego::TruncationConfig c;
    c.op_order = 64;
    return c;
}

}  // namespace

TEST_CASE("operator E on simple symbols") {
    const auto id = MatrixSymbol(2, [](double) { return ComplexMatrix::Identity(2, 2); });
    CHECK(std::abs(szego::szego_E_operator(id, small_cfg()).value - 1.0) < 1e-14);

    const auto psi = scalar([](double x) { return (1.0 - 0.5 * std::exp(I * x)) * (1.0 - 0.5 * std::exp(-I * x)); });
    CHECK(std::abs(szego::szego_E_operator(psi, small_cfg()).value - 4.0 / 3.0) < 1e-12);
}

TEST_CASE("operator E of phi") {
    const auto e = szego::szego_E_operator(model::symbol_phi(at(0.6)));
    CHECK(std::abs(e.value - oracle::kEPhi.at(0.6)) < 1e-6);
    CHECK(e.tail < 1e-10);
}

TEST_CASE("operator E is stable under doubling op_order") {
    szego::TruncationConfig half;
    half.op_order = 128;
    const auto phi = model::symbol_phi(at(0.3));
    const cplx a = szego::szego_E_operator(phi, half).value;
    const cplx b = szego::szego_E_operator(phi).value;
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("operator E reports unresolved tails") {
    szego::TruncationConfig c;
    c.op_order = 8;
    c.grid_size = 4096;
    try {
        szego::szego_E_operator(model::symbol_phi(at(0.9)), c);
        FAIL("expected TailNotResolved");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TailNotResolved);
    }
}

TEST_CASE("scalar series") {
    const auto constant = scalar_table(16, [](int k) { return k == 0 ? cplx(0.7) : cplx(0.0); });
    CHECK(std::abs(szego::scalar_E_series(constant, 16).value - 1.0) < 1e-15);

    CHECK(std::abs(szego::scalar_E_series(log_two_sided(0.5, 0.5, 200), 200).value - 4.0 / 3.0) < 1e-13);

    const auto one_sided = log_two_sided(0.5, 0.0, 200);
    CHECK(std::abs(szego::scalar_E_series(one_sided, 200).value - 1.0) < 1e-15);
}

TEST_CASE("hankel trace") {
    const auto minus_only = log_two_sided(0.0, 0.5, 64);
    CHECK(std::abs(szego::hankel_trace(minus_only, minus_only, 64).value) < 1e-15);

    const auto a = log_two_sided(0.5, 0.5, 200);
    CHECK(std::abs(szego::hankel_trace(a, a, 200).value - oracle::kLogThreeQuarters) < 1e-12);

    szego::TruncationConfig c;
    const int order = c.series_order;
    const int grid = spectral::grid_for_order(order, 4096);
    const auto a1 = spectral::fourier_coefficients(MatrixSymbol::from_scalar(szego::alpha1_symbol(0.3)), grid, order);
    const auto a2 = spectral::fourier_coefficients(MatrixSymbol::from_scalar(szego::alpha2_symbol(0.3)), grid, order);
    CHECK(std::abs(szego::hankel_trace(a1, a2, order).value - oracle::kTraceA1A2) < 1e-9);
    CHECK(std::abs(szego::hankel_trace(a2, a1, order).value - oracle::kTraceA1A2) < 1e-9);
    CHECK(std::abs(szego::hankel_trace(a2, a2, order).value - oracle::kTraceA2A2) < 1e-9);
}

TEST_CASE("hankel trace refuses slowly decaying input") {
    const auto slow = scalar_table(64, [](int k) { return k == 0 ? cplx(0.0) : cplx(1.0 / std::abs(k)); });
    CHECK_THROWS_AS(szego::hankel_trace(slow, slow, 64), Error);
}

TEST_CASE("correction factor") {
    const auto zero = scalar_table(32, [](int) { return cplx(0.0); });
    CHECK(szego::correction_factor(zero, 2, 32) == cplx(1.0));
    const auto constant = scalar_table(32, [](int k) { return k == 0 ? cplx(3.0, 1.0) : cplx(0.0); });
    for (int n : {1, 2, 5}) CHECK(std::abs(szego::correction_factor(constant, n, 32) - 1.0) < 1e-15);

    CHECK(rel(szego::sigma_correction(0.3), oracle::kPrefactor) < 1e-8);
    CHECK(rel(szego::sigma_correction(0.3), closed::prefactor(0.3)) < 1e-8);
}

TEST_CASE("widom banded formula") {
    const szego::LaurentPolynomial causal{1.0, {0.5}, {}};
    CHECK(std::abs(szego::widom_banded_E(causal.table(4), 1, 256) - 1.0) < 1e-14);

    const szego::LaurentPolynomial two{1.0, {0.5}, {0.5}};
    const cplx w = szego::widom_banded_E(two.table(4), 1, 256);
    CHECK(std::abs(w - 4.0 / 3.0) < 1e-13);
    CHECK(std::abs(w - szego::scalar_E_series(two.log_table(200), 200).value) < 1e-13);

    CHECK(szego::widom_banded_E(causal.table(4), 0, 256) == cplx(1.0));
    CHECK_THROWS_AS(szego::widom_banded_E(log_two_sided(0.5, 0.5, 40), 3, 256), Error);

    const auto roots = closed::spectral_roots(0.3);
    const cplx g = 1.0 / (16.0 * roots.xi1 * roots.xi2);
    const cplx lam = closed::lambda_value(0.3);
    const cplx e = szego::widom_banded_E(szego::psi_table(0.3), 3, 4096);
    CHECK(rel(e, g * g * g * lam * lam) < 1e-8);
}

TEST_CASE("widom agrees with the series on random polynomials") {
    for (int i = 0; i < 20; ++i) {
        const auto p = szego::random_laurent(20240601, i);
        const cplx w = szego::widom_banded_E(p.table(8), p.plus_degree(), 4096);
        const cplx s = szego::scalar_E_series(p.log_table(2048), 2048).value;
        CAPTURE(i);
        CHECK(rel(w, s) < 1e-9);
    }
}

TEST_CASE("random laurent is seeded") {
    const auto a = szego::random_laurent(1, 3);
    const auto b = szego::random_laurent(1, 3);
    CHECK(a.constant == b.constant);
    CHECK(a.plus_roots == b.plus_roots);
    CHECK(a.minus_roots == b.minus_roots);
    CHECK(a.plus_degree() >= 1);
    CHECK(a.plus_degree() <= 3);
    for (cplx r : a.plus_roots) CHECK(std::abs(r) < 0.7 + 1e-15);
}

TEST_CASE("bocg residual") {
    szego::TruncationConfig cfg;
    const auto psi = szego::psi_table(0.4, cfg);
    const auto sym = model::symbol_psi(0.4);
    const cplx e = szego::szego_E_operator(sym, cfg).value;
    const cplx g = spectral::geometric_mean(sym, 4096);
    const auto inv = spectral::fourier_coefficients(spectral::pointwise_inverse(sym), 4096, 1023);
    for (int n : {3, 5, 8}) {
        const cplx lhs = spectral::log_determinant(spectral::toeplitz_matrix(inv, n)).value();
        CAPTURE(n);
        CHECK(rel(szego::bocg_residual(psi, n, cfg) * e / std::pow(g, n), lhs) < 1e-8);
    }
    double prev = 1.0;
    for (int n : {1, 2, 3, 4, 8, 12, 16}) {
        const double gap = std::abs(szego::bocg_residual(psi, n, cfg) - 1.0);
        CAPTURE(n);
        CHECK(gap <= prev);
        prev = gap;
        if (n >= 12) CHECK(gap < 1e-8);
    }

    const szego::LaurentPolynomial causal{1.0, {0.5}, {}};
    for (int n : {1, 2, 5}) CHECK(std::abs(szego::bocg_residual(causal.table(4), n, small_cfg()) - 1.0) < 1e-12);
}

TEST_CASE("bocg at t=0.3 against widom") {
    szego::TruncationConfig cfg;
    const auto psi = szego::psi_table(0.3, cfg);
    const auto sym = model::symbol_psi(0.3);
    const cplx e = szego::widom_banded_E(psi, 3, 4096);
    const cplx g = spectral::geometric_mean(sym, 4096);
    const auto inv = spectral::fourier_coefficients(spectral::pointwise_inverse(sym), 4096, 1023);
    const cplx lhs = spectral::log_determinant(spectral::toeplitz_matrix(inv, 3)).value();
    CHECK(rel(szego::bocg_residual(psi, 3, cfg) * e / (g * g * g), lhs) < 1e-8);
}

TEST_CASE("reduction chain agrees with the closed form") {
    for (double t : {0.3, 0.7}) {
        CAPTURE(t);
        CHECK(rel(szego::reduced_E(t), oracle::kEPhi.at(t)) < 1e-8);
    }
}

TEST_CASE("exponential representation") {
    const auto check = [](double t, int points, double tol) {
        const auto rep = szego::exp_representation(at(t));
        const auto phi = model::symbol_phi(at(t));
        double worst = 0.0;
        for (int j = 0; j < points; ++j) {
            const double x = -kPi + 2.0 * kPi * j / points;
            ComplexMatrix target = -phi(x);
            target(0, 1) = -target(0, 1);
            target(1, 0) = -target(1, 0);
            worst = std::max(worst, (rep.reconstructed(x) - target).cwiseAbs().maxCoeff());
            CHECK(std::abs(rep.Q(x).trace()) < 1e-14);
        }
        CHECK(worst <= tol);
    };
    check(0.5, 64, 1e-9);
    check(0.3, 256, 1e-9);
    check(0.7, 256, 1e-9);

    const auto rep = szego::exp_representation(at(0.7));
    const ComplexMatrix q = rep.Q(1.0);
    const cplx d = rep.delta(1.0);
    CHECK(((q * q) - d * d * ComplexMatrix::Identity(2, 2)).norm() < 1e-13);

    for (double x : {0.0, kPi, 1e-9}) CHECK(std::isfinite(std::abs(rep.b(x))));
    CHECK_THROWS_AS(szego::exp_representation(at(1.0)), Error);
}
