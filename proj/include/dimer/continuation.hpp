#pragma once

// T_n(phi) continued to every Re(t) > 0 and the Toeplitz-plus-corner form
// used for its limit.

#include <vector>

#include "dimer/dimer_model.hpp"
#include "dimer/spectral_core.hpp"

namespace dimer::continuation {

/// e+(x) = c(x) - 1/(e^{-ix} - t), evaluated as one fraction. Within 1e-4 of
/// the removable pole it is extrapolated from x +- h, x +- 2h (h = 1e-3).
spectral::ScalarSymbol e_plus_symbol(cplx t);

/// Strictly lower triangular Toeplitz, entry (j, k) = t^{j-k-1} for j > k.
ComplexMatrix k_plus_matrix(cplx t, int n);

/// Fourier tables of e+ and d at one t, reused across n.
struct ContinuedSymbols {
    cplx t;
    spectral::FourierTable e_plus;
    spectral::FourierTable d;
};

ContinuedSymbols continued_symbols(cplx t, const SpectralConfig& cfg = {});

/// [[B, T_n(d)], [T_n(d)^T, B^T]] with B = T_n(e+) + K+.
ComplexMatrix b_hat(const ContinuedSymbols& syms, int n);
ComplexMatrix b_hat(cplx t, int n, const SpectralConfig& cfg = {});

struct ContinuedSequence {
    cplx t;
    int n = 0;
    ComplexMatrix b_hat;
    spectral::MatrixSymbol phi_hat;
    /// P_n K P_n and W_n L W_n as 2n x 2n matrices in the interleaved block layout.
    ComplexMatrix K_op;
    ComplexMatrix L_op;
    /// T_n(phi_hat) + P_n K P_n + W_n L W_n
    ComplexMatrix rhs;
    spectral::LogDet lhs_det;
    spectral::LogDet rhs_det;
    double relative_gap = 0.0;
};

/// Builds both sides of det B-hat = det(T_n(phi_hat) + P_n K P_n + W_n L W_n)
/// independently. DecompositionMismatch when they differ by more than tol
/// relative, or when K_op or L_op has numerical rank above 2.
ContinuedSequence theta_decomposition(cplx t, int n, const SpectralConfig& cfg = {}, double tol = 1e-9);

/// Numerical rank with singular values below rel_tol * largest treated as zero.
int numerical_rank(const ComplexMatrix& m, double rel_tol = 1e-12);

struct ScanRow {
    int n = 0;
    cplx det;
    double det_error = 0.0;    // |det - E_t|
    cplx correlation;          // sqrt(det) / 2
    double correlation_error = 0.0;
};

struct ScanResult {
    cplx t;
    cplx target;  // E_t from the closed form
    std::vector<ScanRow> rows;
    bool non_monotone = false;  // some det_error grew along the list
};

/// det B-hat_{n,t} for each n (increasing), computed concurrently.
ScanResult limit_scan(cplx t, const std::vector<int>& n_list, const SpectralConfig& cfg = {});

/// First n in 4, 8, ..., n_max with |det B-hat - E_t| <= eps, or -1.
int n_to_reach(cplx t, double eps, int n_max, const SpectralConfig& cfg = {});

}  // namespace dimer::continuation
