#pragma once

// Operator-determinant constants of block Toeplitz symbols and the identities
// that reduce them to finite computations.

#include <cstdint>
#include <vector>

#include "dimer/dimer_model.hpp"
#include "dimer/spectral_core.hpp"

namespace dimer::szego {

struct TruncationConfig {
    int op_order = 256;       // size of semi-infinite truncations (in blocks)
    int series_order = 2048;  // terms of the scalar trace/log series
    double tolerance = 1e-10;
    int grid_size = 0;        // 0 picks the smallest power of two >= 4*(2*op_order)+4, at least 4096
};

/// A computed value with the heuristic size of what truncation left out.
struct Estimate {
    cplx value;
    double tail = 0.0;
};

/// det(I - H(sym) H(sym~^{-1})) on op_order x op_order block truncations.
Estimate szego_E_operator(const spectral::MatrixSymbol& sym, const TruncationConfig& cfg = {});

/// exp(sum_{k=1..K} k c_k c_{-k}) for the Fourier table of a scalar log symbol.
Estimate scalar_E_series(const spectral::FourierTable& log_coeffs, int order, double tolerance = 1e-10);

/// sum_{m=1..K} m a_m b_{-m}, i.e. trace H(a) H(b~).
Estimate hankel_trace(const spectral::FourierTable& a, const spectral::FourierTable& b, int order,
                      double tolerance = 1e-10);

/// exp(N * trace H(a) H(a~)).
cplx correction_factor(const spectral::FourierTable& a, int block_size, int order, double tolerance = 1e-10);

/// G(psi)^n det T_n(psi^{-1}) for psi with psi_k = 0 beyond n on one side.
/// grid_size drives both the inverse's coefficients and the geometric mean.
cplx widom_banded_E(const spectral::FourierTable& psi, int band, int grid_size);

/// det(I - H(z^{-n} psi) T^{-1}(psi~) H(psi~ z^{-n}) T^{-1}(psi)) on truncations.
cplx bocg_residual(const spectral::FourierTable& psi, int n, const TruncationConfig& cfg = {});

/// alpha1 = log(1 - 2t cos x + t^2), alpha2 = log(t^2 + sin^2 x + sin^4 x),
/// for real 0 < t < 1.
spectral::ScalarSymbol alpha1_symbol(cplx t);
spectral::ScalarSymbol alpha2_symbol(cplx t);

/// exp(2 (trace H(a1)H(a1~) - trace H(a2)H(a2~))) with a1 = -alpha1/2 + pi i
/// and a2 = (alpha1 + alpha2)/2 + pi i, summed to cfg.series_order.
cplx sigma_correction(cplx t, const TruncationConfig& cfg = {});

/// sigma_correction(t) * widom_banded_E(psi, 3): E(phi) with no operator
/// truncation.
cplx reduced_E(cplx t, const TruncationConfig& cfg = {});

/// Fourier table of psi at order cfg.op_order.
spectral::FourierTable psi_table(cplx t, const TruncationConfig& cfg = {});

/// psi(z) = constant * prod(1 - a z) * prod(1 - b / z) with |a|, |b| < 1, so
/// psi has winding number zero and psi_k = 0 for k > plus_roots.size().
struct LaurentPolynomial {
    cplx constant{1.0, 0.0};
    std::vector<cplx> plus_roots;
    std::vector<cplx> minus_roots;

    int plus_degree() const { return static_cast<int>(plus_roots.size()); }
    /// Exact coefficients by polynomial multiplication.
    spectral::FourierTable table(int order) const;
    /// Exact coefficients of log psi: -sum a^k / k for k > 0, -sum b^|k| / |k| for k < 0.
    spectral::FourierTable log_table(int order) const;
};

/// Seeded sample: 1..3 plus roots, 0..3 minus roots, moduli in [0.05, 0.7],
/// |constant| in [0.5, 2].
LaurentPolynomial random_laurent(std::uint64_t seed, int index);

struct ExpRepresentation {
    spectral::ScalarSymbol a;
    spectral::ScalarSymbol b;
    spectral::MatrixSymbol Q;
    /// e^{a I + b Q}; equals sigma * psi, i.e. [[-c, d], [d~, -c~]] with c as
    /// built by symbol_phi.
    spectral::MatrixSymbol reconstructed;
    spectral::ScalarSymbol delta;
};

/// Requires real 0 < t < 1. Throws BranchFailure when the log of
/// -(p+p~)/2 - Delta cannot be anchored real at x = 0 and x = pi.
ExpRepresentation exp_representation(const DimerParams& params);

}  // namespace dimer::szego
