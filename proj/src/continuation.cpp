#include "dimer/continuation.hpp"

#include <cmath>
#include <string>

#include "dimer/closed_form.hpp"
#include "dimer/parallel.hpp"

namespace dimer::continuation {

using spectral::FourierTable;
using spectral::LogDet;
using spectral::MatrixSymbol;

namespace {

void require_admissible(cplx t) {
    if (!(t.real() > 0.0) || !std::isfinite(t.imag()))
        fail(ErrorCode::ParameterOutOfRange, "t must satisfy Re(t) > 0");
}

cplx checked_radical(cplx t, double x) {
    const cplx r = model::radical(t, x);
    if (!(r.real() > 0.0)) fail(ErrorCode::BranchFailure, "radical left the right half-plane at x=" + std::to_string(x));
    return r;
}

cplx e_plus_raw(cplx t, double x) {
    const double s = std::sin(x);
    const cplx r = checked_radical(t, x);
    return ((t * std::cos(x) + s * s) - r) / ((std::polar(1.0, -x) - t) * r);
}

cplx e_plus_value(cplx t, double x) {
    if (std::abs(std::polar(1.0, -x) - t) >= 1e-4) return e_plus_raw(t, x);
    constexpr double h = 1e-3;
    return (2.0 / 3.0) * (e_plus_raw(t, x - h) + e_plus_raw(t, x + h)) -
           (1.0 / 6.0) * (e_plus_raw(t, x - 2 * h) + e_plus_raw(t, x + 2 * h));
}

cplx d_cont(cplx t, double x) { return std::sin(x) / checked_radical(t, x); }

MatrixSymbol phi_plus(cplx t) {
    return MatrixSymbol(2, [t](double x) {
        ComplexMatrix m(2, 2);
        m(0, 0) = e_plus_value(t, x);
        m(0, 1) = d_cont(t, x);
        m(1, 0) = d_cont(t, -x);
        m(1, 1) = e_plus_value(t, -x);
        return m;
    });
}

MatrixSymbol phi_hat_symbol(cplx t) {
    const MatrixSymbol plus = phi_plus(t);
    return MatrixSymbol(2, [t, plus](double x) {
        const cplx z = std::polar(1.0, x);
        ComplexMatrix m = plus(x);
        m.row(0) *= 1.0 - t * z;
        m.row(1) *= 1.0 - t / z;
        m(0, 0) += z;
        m(1, 1) += 1.0 / z;
        return m;
    });
}

}  // namespace

spectral::ScalarSymbol e_plus_symbol(cplx t) {
    require_admissible(t);
    return {[t](double x) { return e_plus_value(t, x); }};
}

ComplexMatrix k_plus_matrix(cplx t, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    for (int j = 1; j < n; ++j)
        for (int c = 0; c < j; ++c) k(j, c) = std::pow(t, j - c - 1);
    return k;
}

ContinuedSymbols continued_symbols(cplx t, const SpectralConfig& cfg) {
    require_admissible(t);
    const auto e = e_plus_symbol(t);
    const spectral::ScalarSymbol d{[t](double x) { return d_cont(t, x); }};
    return {t,
            spectral::fourier_coefficients(MatrixSymbol::from_scalar(e), cfg.grid_size, cfg.order, cfg.tail_tol),
            spectral::fourier_coefficients(MatrixSymbol::from_scalar(d), cfg.grid_size, cfg.order, cfg.tail_tol)};
}

ComplexMatrix b_hat(const ContinuedSymbols& syms, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    const ComplexMatrix b = spectral::toeplitz_matrix(syms.e_plus, n) + k_plus_matrix(syms.t, n);
    const ComplexMatrix d = spectral::toeplitz_matrix(syms.d, n);
    ComplexMatrix out(2 * n, 2 * n);
    out << b, d, d.transpose(), b.transpose();
    return out;
}

ComplexMatrix b_hat(cplx t, int n, const SpectralConfig& cfg) { return b_hat(continued_symbols(t, cfg), n); }

int numerical_rank(const ComplexMatrix& m, double rel_tol) {
    const Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++rank;
    return rank;
}

ContinuedSequence theta_decomposition(cplx t, int n, const SpectralConfig& cfg, double tol) {
    require_admissible(t);
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    require(n <= cfg.order, ErrorCode::TruncationTooShort, "n exceeds the coefficient order");

    ContinuedSequence seq{t, n, b_hat(t, n, cfg), phi_hat_symbol(t), {}, {}, {}, {}, {}, 0.0};

    const FourierTable hat = spectral::fourier_coefficients(seq.phi_hat, cfg.grid_size, cfg.order, cfg.tail_tol);
    const FourierTable plus = spectral::fourier_coefficients(phi_plus(t), cfg.grid_size, cfg.order, cfg.tail_tol);

    // Theta+ has one coefficient on each side of zero, so both Hankel
    // products reduce to a single block row.
    seq.K_op = ComplexMatrix::Zero(2 * n, 2 * n);
    seq.L_op = ComplexMatrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        seq.K_op.block(0, 2 * k, 1, 2) = t * plus[-(k + 1)].row(0);
        seq.L_op.block(2 * (n - 1) + 1, 2 * (n - 1 - k), 1, 2) = t * plus[k + 1].row(1);
    }
    seq.rhs = spectral::toeplitz_matrix(hat, n) + seq.K_op + seq.L_op;

    seq.lhs_det = spectral::log_determinant(seq.b_hat);
    seq.rhs_det = spectral::log_determinant(seq.rhs);
    if (seq.lhs_det.is_singular) fail(ErrorCode::SingularDeterminant, "det B-hat is numerically singular");
    seq.relative_gap = seq.rhs_det.is_singular ? 1.0 : std::abs(std::exp(seq.rhs_det.log_value() - seq.lhs_det.log_value()) - 1.0);

    if (numerical_rank(seq.K_op) > 2 || numerical_rank(seq.L_op) > 2)
        fail(ErrorCode::DecompositionMismatch, "corner perturbation has rank above 2");
    if (!(seq.relative_gap <= tol))
        fail(ErrorCode::DecompositionMismatch,
             "determinants differ by " + std::to_string(seq.relative_gap) + " relative at n=" + std::to_string(n));
    return seq;
}

ScanResult limit_scan(cplx t, const std::vector<int>& n_list, const SpectralConfig& cfg) {
    require_admissible(t);
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        require(n_list[i] >= 1, ErrorCode::InvalidArgument, "n must be positive");
        require(i == 0 || n_list[i] > n_list[i - 1], ErrorCode::InvalidArgument, "n list must be increasing");
    }
    const ContinuedSymbols syms = continued_symbols(t, cfg);
    ScanResult out{t, closed::e_phi(t), {}, false};
    const cplx p_target = closed::correlation_limit(t);

    out.rows = parallel_map<ScanRow>(n_list.size(), [&](std::size_t i) {
        ScanRow row;
        row.n = n_list[i];
        const LogDet ld = spectral::log_determinant(b_hat(syms, row.n));
        if (ld.is_singular) fail(ErrorCode::SingularDeterminant, "det B-hat singular at n=" + std::to_string(row.n));
        row.det = ld.value();
        row.det_error = std::abs(row.det - out.target);
        row.correlation = 0.5 * std::exp(0.5 * ld.log_value());
        row.correlation_error = std::abs(row.correlation - p_target);
        return row;
    });
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (out.rows[i].det_error > out.rows[i - 1].det_error) out.non_monotone = true;
    return out;
}

int n_to_reach(cplx t, double eps, int n_max, const SpectralConfig& cfg) {
    require_admissible(t);
    const ContinuedSymbols syms = continued_symbols(t, cfg);
    const cplx target = closed::e_phi(t);
    for (int n = 4; n <= n_max; n *= 2) {
        const LogDet ld = spectral::log_determinant(b_hat(syms, n));
        if (!ld.is_singular && std::abs(ld.value() - target) <= eps) return n;
    }
    return -1;
}

}  // namespace dimer::continuation
