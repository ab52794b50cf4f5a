#pragma once

// The dimer matrix M_n built from its defining double integrals, and the 2x2
// block symbol whose Toeplitz determinants reproduce det M_n.

#include <map>

#include "dimer/spectral_core.hpp"

namespace dimer {

struct SpectralConfig {
    int grid_size = 4096;  // M, power of two
    int order = 512;       // K
    double tail_tol = spectral::kDefaultTailTolerance;
};

struct DimerParams {
    cplx t{0.5, 0.0};
    int quad_grid = 256;
    SpectralConfig spectral{};

    /// Throws ParameterOutOfRange unless Re(t) > 0 and the grids are sane.
    void validate() const;
};

namespace model {

/// floor(m / 2) for any sign of m.
constexpr int floor_half(int m) { return m >= 0 ? m / 2 : -((-m + 1) / 2); }
constexpr int sign_power(int e) { return (e % 2 == 0) ? 1 : -1; }

struct DimerCoefficients {
    cplx t;
    std::map<int, cplx> R;
    std::map<int, cplx> Q;
};

/// R_k and Q_k for k in [k_min, k_max] by tensor-product periodic trapezoid
/// at quad_grid, checked against 2*quad_grid (QuadratureUnconverged above 1e-10
/// relative to max(1, |value|)).
DimerCoefficients dimer_coefficients(const DimerParams& params, int k_min, int k_max);

cplx coefficient_R(const DimerParams& params, int k);
cplx coefficient_Q(const DimerParams& params, int k);

/// The 2n x 2n matrix [[R, Q], [Q, R]], 1-based entry formulas.
ComplexMatrix dimer_matrix(const DimerParams& params, int n);
ComplexMatrix dimer_matrix(const DimerCoefficients& coeffs, int n);

/// sqrt(t^2 + sin^2 x + sin^4 x), principal branch (positive for real t > 0).
cplx radical(cplx t, double x);

/// c(e^{ix}) = (t cos x + sin^2 x) / ((e^{-ix} - t) * radical)
cplx c_value(cplx t, double x);
/// d(e^{ix}) = sin x / radical
cplx d_value(cplx t, double x);

/// [[c, d], [d~, c~]] for real 0 < t < 1.
spectral::MatrixSymbol symbol_phi(const DimerParams& params);

/// p = (t cos x + sin^2 x)(t - e^{ix}),  q = sin x (1 - 2t cos x + t^2)
cplx p_value(cplx t, double x);
cplx q_value(cplx t, double x);
/// radical^{-1} (1 - 2t cos x + t^2)^{-1}
cplx sigma_value(cplx t, double x);

/// psi = [[p, q], [q~, p~]], a trigonometric polynomial of degree 3. Any t
/// with Re(t) > 0 is accepted.
spectral::MatrixSymbol symbol_psi(cplx t);

struct AppendixSymbols {
    spectral::ScalarSymbol s_plus_t_quadrature;
    spectral::ScalarSymbol v_quadrature;
    spectral::ScalarSymbol s_plus_t_closed;
    spectral::ScalarSymbol v_closed;
};

/// S + T and V (without its n-dependent sign) by 1-D periodic trapezoid in y
/// and by closed form. Quadrature evaluators throw QuadratureUnconverged.
AppendixSymbols appendix_symbols(const DimerParams& params);

/// diag(I_n, W_n) * m * diag(I_n, W_n), W_n the index reversal.
ComplexMatrix flip_conjugate(const ComplexMatrix& m, int n);

/// 1/2 sqrt(det M_n) from the log-determinant. For real t the imaginary
/// residue must be below 1e-10 and is dropped.
cplx correlation_finite(const DimerParams& params, int n);

}  // namespace model
}  // namespace dimer
