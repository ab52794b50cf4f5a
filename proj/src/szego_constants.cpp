#include "dimer/szego_constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace dimer::szego {

using spectral::FourierTable;
using spectral::LogDet;
using spectral::MatrixSymbol;

namespace {

// Geometric extrapolation of the neglected part of a series from its last
// few term magnitudes.
double series_tail(const std::vector<double>& mags) {
    const std::size_t n = mags.size();
    if (n < 4) return n ? mags.back() : 0.0;
    const double recent = std::max(mags[n - 1], mags[n - 2]);
    const double earlier = std::max(mags[n - 3], mags[n - 4]);
    if (recent == 0.0) return 0.0;
    if (earlier == 0.0) return recent;
    // Terms already at rounding level carry no decay information.
    const double peak = *std::max_element(mags.begin(), mags.end());
    if (recent <= 1e-15 * peak) return recent;
    const double rho = std::sqrt(recent / earlier);
    if (rho >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * recent * rho / (1.0 - rho);
}

void require_scalar(const FourierTable& tab, const char* what) {
    require(tab.block_size() == 1, ErrorCode::DimensionMismatch, std::string(what) + " must be a scalar table");
}

double max_positive_coefficient(const FourierTable& tab) {
    double m = 0.0;
    for (int k = 1; k <= tab.order(); ++k) m = std::max(m, tab[k].cwiseAbs().maxCoeff());
    return m;
}

int default_grid(const TruncationConfig& cfg) {
    if (cfg.grid_size > 0) return cfg.grid_size;
    return spectral::grid_for_order(2 * cfg.op_order, 4096);
}

}  // namespace

Estimate szego_E_operator(const MatrixSymbol& sym, const TruncationConfig& cfg) {
    require(cfg.op_order >= 1, ErrorCode::InvalidArgument, "op_order must be positive");
    const int m = cfg.op_order;
    const int order = 2 * m;
    const int grid = default_grid(cfg);

    const FourierTable fwd = spectral::fourier_coefficients(sym, grid, order);
    const FourierTable inv = spectral::fourier_coefficients(spectral::pointwise_inverse(sym.reflected()), grid, order);

    // Entries beyond the truncation couple to everything that was kept.
    const double tail = m * (fwd.max_outside_band(m) * max_positive_coefficient(inv) +
                             inv.max_outside_band(m) * max_positive_coefficient(fwd));
    if (tail > cfg.tolerance)
        fail(ErrorCode::TailNotResolved,
             "operator truncation tail " + std::to_string(tail) + " at op_order " + std::to_string(m));

    const ComplexMatrix h1 = spectral::hankel_matrix(fwd, m);
    const ComplexMatrix h2 = spectral::hankel_matrix(inv, m);
    const ComplexMatrix op = ComplexMatrix::Identity(h1.rows(), h1.cols()) - h1 * h2;
    return {spectral::log_determinant(op).value(), tail};
}

Estimate hankel_trace(const FourierTable& a, const FourierTable& b, int order, double tolerance) {
    require_scalar(a, "hankel_trace a");
    require_scalar(b, "hankel_trace b");
    require(order >= 1, ErrorCode::InvalidArgument, "series order must be positive");
    require(order <= a.order() && order <= b.order(), ErrorCode::TruncationTooShort,
            "coefficient tables shorter than series order " + std::to_string(order));
    cplx sum = 0.0;
    std::vector<double> mags;
    mags.reserve(static_cast<std::size_t>(order));
    for (int m = 1; m <= order; ++m) {
        const cplx term = static_cast<double>(m) * a[m](0, 0) * b[-m](0, 0);
        sum += term;
        mags.push_back(std::abs(term));
    }
    const double tail = series_tail(mags);
    if (tail > tolerance)
        fail(ErrorCode::TailNotResolved, "trace series tail " + std::to_string(tail) + " after " +
                                             std::to_string(order) + " terms");
    return {sum, tail};
}

Estimate scalar_E_series(const FourierTable& log_coeffs, int order, double tolerance) {
    require_scalar(log_coeffs, "scalar_E_series");
    const Estimate s = hankel_trace(log_coeffs, log_coeffs, order, tolerance);
    const cplx e = std::exp(s.value);
    return {e, std::abs(e) * s.tail};
}

cplx correction_factor(const FourierTable& a, int block_size, int order, double tolerance) {
    require(block_size >= 1, ErrorCode::InvalidArgument, "block size must be positive");
    return std::exp(static_cast<double>(block_size) * hankel_trace(a, a, order, tolerance).value);
}

cplx widom_banded_E(const FourierTable& psi, int band, int grid_size) {
    require(band >= 0, ErrorCode::InvalidArgument, "band must be non-negative");
    double upper = 0.0, lower = 0.0;
    for (int k = band + 1; k <= psi.order(); ++k) {
        upper = std::max(upper, psi[k].cwiseAbs().maxCoeff());
        lower = std::max(lower, psi[-k].cwiseAbs().maxCoeff());
    }
    if (std::min(upper, lower) > 1e-13)
        fail(ErrorCode::NotBanded, "coefficients beyond band " + std::to_string(band) + " reach " +
                                       std::to_string(std::min(upper, lower)) + " on both sides");
    if (band == 0) return 1.0;

    const MatrixSymbol sym = psi.to_symbol();
    const FourierTable inv =
        spectral::fourier_coefficients(spectral::pointwise_inverse(sym), grid_size, grid_size / 4 - 1);
    const LogDet ld = spectral::log_determinant(spectral::toeplitz_matrix(inv, band));
    if (ld.is_singular) return 0.0;
    const cplx g = spectral::geometric_mean(sym, grid_size);
    return std::exp(static_cast<double>(band) * std::log(g) + ld.log_value());
}

cplx bocg_residual(const FourierTable& psi, int n, const TruncationConfig& cfg) {
    require(n >= 0, ErrorCode::InvalidArgument, "n must be non-negative");
    require(cfg.op_order >= 1, ErrorCode::InvalidArgument, "op_order must be positive");
    const int m = cfg.op_order;
    const FourierTable refl = psi.reflected();

    const ComplexMatrix d = spectral::toeplitz_matrix_zero_extended(psi, m);
    const ComplexMatrix b = spectral::toeplitz_matrix_zero_extended(refl, m);
    const ComplexMatrix a = spectral::hankel_matrix_zero_extended(psi.shifted(n), m);
    const ComplexMatrix c = spectral::hankel_matrix_zero_extended(refl.shifted(n), m);

    const LogDet ld_d = spectral::log_determinant(d);
    if (ld_d.is_singular || spectral::log_determinant(b).is_singular)
        fail(ErrorCode::TruncatedOperatorSingular, "truncated T(psi) or T(psi~) is singular at op_order " +
                                                       std::to_string(m));
    const Eigen::PartialPivLU<ComplexMatrix> lu(b);
    const ComplexMatrix schur = d - a * lu.solve(c);
    const LogDet ld_s = spectral::log_determinant(schur);
    if (ld_s.is_singular) return 0.0;
    return std::exp(ld_s.log_value() - ld_d.log_value());
}

// ---------------------------------------------------------------- sigma split

namespace {

void require_real_unit(cplx t, const char* what) {
    if (t.imag() != 0.0 || !(t.real() > 0.0 && t.real() < 1.0))
        fail(ErrorCode::ParameterOutOfRange, std::string(what) + " needs real 0 < t < 1");
}

}  // namespace

spectral::ScalarSymbol alpha1_symbol(cplx t) {
    require_real_unit(t, "alpha1");
    const double tr = t.real();
    return {[tr](double x) { return cplx(std::log(1.0 - 2.0 * tr * std::cos(x) + tr * tr)); }};
}

spectral::ScalarSymbol alpha2_symbol(cplx t) {
    require_real_unit(t, "alpha2");
    const double tr = t.real();
    return {[tr](double x) {
        const double s2 = std::sin(x) * std::sin(x);
        return cplx(std::log(tr * tr + s2 + s2 * s2));
    }};
}

cplx sigma_correction(cplx t, const TruncationConfig& cfg) {
    const auto a1 = alpha1_symbol(t), a2 = alpha2_symbol(t);
    const spectral::ScalarSymbol s1{[a1](double x) { return -0.5 * a1(x) + cplx(0.0, kPi); }};
    const spectral::ScalarSymbol s2{[a1, a2](double x) { return 0.5 * (a1(x) + a2(x)) + cplx(0.0, kPi); }};
    const int k = cfg.series_order;
    const int grid = spectral::grid_for_order(k, 4096);
    const FourierTable t1 = spectral::fourier_coefficients(MatrixSymbol::from_scalar(s1), grid, k);
    const FourierTable t2 = spectral::fourier_coefficients(MatrixSymbol::from_scalar(s2), grid, k);
    return correction_factor(t1, 2, k, cfg.tolerance) / correction_factor(t2, 2, k, cfg.tolerance);
}

FourierTable psi_table(cplx t, const TruncationConfig& cfg) {
    const int order = std::max(cfg.op_order, 8);
    return spectral::fourier_coefficients(model::symbol_psi(t), spectral::grid_for_order(order, 4096), order);
}

cplx reduced_E(cplx t, const TruncationConfig& cfg) {
    return sigma_correction(t, cfg) * widom_banded_E(psi_table(t, cfg), 3, 4096);
}

// ---------------------------------------------------------------- Laurent

FourierTable LaurentPolynomial::table(int order) const {
    std::vector<cplx> plus{1.0}, minus{1.0};
    auto multiply = [](std::vector<cplx>& poly, cplx root) {
        poly.push_back(0.0);
        for (std::size_t k = poly.size() - 1; k > 0; --k) poly[k] -= root * poly[k - 1];
    };
    for (cplx a : plus_roots) multiply(plus, a);
    for (cplx b : minus_roots) multiply(minus, b);
    require(order >= static_cast<int>(std::max(plus.size(), minus.size())) - 1, ErrorCode::TruncationTooShort,
            "table order below the polynomial degree");
    FourierTable out(1, order);
    for (std::size_t i = 0; i < plus.size(); ++i)
        for (std::size_t j = 0; j < minus.size(); ++j)
            out[static_cast<int>(i) - static_cast<int>(j)](0, 0) += constant * plus[i] * minus[j];
    return out;
}

FourierTable LaurentPolynomial::log_table(int order) const {
    FourierTable out(1, order);
    out[0](0, 0) = std::log(constant);
    for (int k = 1; k <= order; ++k) {
        cplx up = 0.0, down = 0.0;
        for (cplx a : plus_roots) up -= std::pow(a, k) / static_cast<double>(k);
        for (cplx b : minus_roots) down -= std::pow(b, k) / static_cast<double>(k);
        out[k](0, 0) = up;
        out[-k](0, 0) = down;
    }
    return out;
}

LaurentPolynomial random_laurent(std::uint64_t seed, int index) {
    std::mt19937_64 gen(seed * 1000003ULL + static_cast<std::uint64_t>(index));
    std::uniform_int_distribution<int> plus_count(1, 3), minus_count(0, 3);
    std::uniform_real_distribution<double> modulus(0.05, 0.7), angle(-kPi, kPi), scale(0.5, 2.0);
    LaurentPolynomial p;
    p.constant = std::polar(scale(gen), angle(gen));
    const int np = plus_count(gen), nm = minus_count(gen);
    for (int i = 0; i < np; ++i) p.plus_roots.push_back(std::polar(modulus(gen), angle(gen)));
    for (int i = 0; i < nm; ++i) p.minus_roots.push_back(std::polar(modulus(gen), angle(gen)));
    return p;
}

// ---------------------------------------------------------------- exp form

namespace {

struct ExpPieces {
    cplx t;

    double g(double x) const { return 1.0 - 2.0 * t.real() * std::cos(x) + t.real() * t.real(); }
    double h(double x) const {
        const double s = std::sin(x);
        return t.real() * std::cos(x) + s * s;
    }
    cplx delta(double x) const {
        const double gx = g(x), hx = h(x);
        return cplx(0.0, std::sin(x) * std::sqrt(gx * gx + hx * hx));
    }
    cplx alpha(double x) const { return -h(x) * (t.real() - std::cos(x)) - delta(x); }

    // Direct formula; loses digits as Delta -> 0.
    cplx b_raw(double x) const {
        const double r = model::radical(t, x).real();
        const double alpha1 = std::log(g(x));
        const double log_sigma = -std::log(r) - alpha1;
        return (0.5 * alpha1 + log_sigma + std::log(alpha(x))) / delta(x);
    }

    cplx b(double x) const {
        if (std::abs(std::sin(x)) >= 1e-4) return b_raw(x);
        constexpr double step = 1e-3;
        const cplx near = 0.5 * (b_raw(x + step) + b_raw(x - step));
        const cplx far = 0.5 * (b_raw(x + 2 * step) + b_raw(x - 2 * step));
        return (4.0 * near - far) / 3.0;
    }

    cplx a(double x) const { return cplx(-0.5 * std::log(g(x)), kPi); }

    ComplexMatrix q(double x) const {
        const cplx p = model::p_value(t, x), pt = model::p_value(t, -x);
        ComplexMatrix m(2, 2);
        m(0, 0) = 0.5 * (p - pt);
        m(0, 1) = model::q_value(t, x);
        m(1, 0) = model::q_value(t, -x);
        m(1, 1) = 0.5 * (pt - p);
        return m;
    }
};

// The log of alpha is taken on the principal branch; this is the anchored
// branch only if continuation from x = 0 never leaves it.
void check_alpha_branch(const ExpPieces& pc) {
    const cplx a0 = pc.alpha(0.0);
    const cplx api = pc.alpha(kPi);
    if (!(a0.real() > 0.0) || std::abs(a0.imag()) > 1e-12 * std::abs(a0) || !(api.real() > 0.0) ||
        std::abs(api.imag()) > 1e-12 * std::abs(api))
        fail(ErrorCode::BranchFailure, "alpha is not real positive at x = 0 and x = pi");
    constexpr int steps = 2048;
    for (int side : {1, -1}) {
        double unwrapped = std::arg(a0);
        for (int j = 1; j <= steps; ++j) {
            const double x = side * kPi * j / steps;
            const double principal = std::arg(pc.alpha(x));
            unwrapped += std::remainder(principal - unwrapped, 2.0 * kPi);
            if (std::abs(unwrapped - principal) > 1e-9)
                fail(ErrorCode::BranchFailure, "log alpha leaves the principal branch at x=" + std::to_string(x));
        }
        if (std::abs(unwrapped) > 1e-9)
            fail(ErrorCode::BranchFailure, "log alpha is not real at x = pi after continuation");
    }
}

}  // namespace

ExpRepresentation exp_representation(const DimerParams& params) {
    params.validate();
    const cplx t = params.t;
    if (t.imag() != 0.0 || !(t.real() > 0.0 && t.real() < 1.0))
        fail(ErrorCode::ParameterOutOfRange, "exp_representation needs real 0 < t < 1");
    const ExpPieces pc{t};
    check_alpha_branch(pc);

    ExpRepresentation out{
        {[pc](double x) { return pc.a(x); }},
        {[pc](double x) { return pc.b(x); }},
        MatrixSymbol(2, [pc](double x) { return pc.q(x); }),
        MatrixSymbol(2,
                     [pc](double x) {
                         const cplx bx = pc.b(x);
                         const cplx z = bx * pc.delta(x);
                         const cplx sinhc = std::abs(z) < 1e-8 ? cplx(1.0) : std::sinh(z) / z;
                         ComplexMatrix m = bx * sinhc * pc.q(x);
                         m.diagonal().array() += std::cosh(z);
                         return ComplexMatrix(std::exp(pc.a(x)) * m);
                     }),
        {[pc](double x) { return pc.delta(x); }},
    };
    return out;
}

}  // namespace dimer::szego
