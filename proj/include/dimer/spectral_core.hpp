#pragma once

// Symbols on the unit circle, their Fourier tables, block Toeplitz/Hankel
// assembly and overflow-safe complex determinants.
//
// Angles are in radians. Sampling grids are x_j = 2*pi*j/M, j = 0..M-1; all
// shipped symbols are 2*pi-periodic so this is the same circle as [-pi, pi).

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dimer/errors.hpp"

namespace dimer {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

namespace spectral {

enum class Smoothness { analytic_in_annulus, wiener_class };

struct ScalarSymbol {
    std::function<cplx(double)> evaluator;
    Smoothness smoothness = Smoothness::analytic_in_annulus;

    cplx operator()(double x) const { return evaluator(x); }
};

/// N x N matrix-valued function on the circle, evaluated jointly so that all
/// entries share one grid.
class MatrixSymbol {
public:
    using Evaluator = std::function<ComplexMatrix(double)>;

    MatrixSymbol(int block_size, Evaluator evaluator,
                 Smoothness smoothness = Smoothness::analytic_in_annulus);

    static MatrixSymbol from_scalar(const ScalarSymbol& s);
    /// Row-major N*N entries.
    static MatrixSymbol from_entries(int block_size, std::vector<ScalarSymbol> entries);

    int block_size() const noexcept { return n_; }
    Smoothness smoothness() const noexcept { return smoothness_; }
    ComplexMatrix operator()(double x) const;
    ScalarSymbol entry(int row, int col) const;

    /// x -> sym(-x)
    MatrixSymbol reflected() const;
    /// Pointwise product (this)(x) * rhs(x).
    MatrixSymbol times(const MatrixSymbol& rhs) const;
    MatrixSymbol scaled(const ScalarSymbol& s) const;

    std::vector<ComplexMatrix> sample(int grid_size) const;

private:
    int n_;
    Evaluator eval_;
    Smoothness smoothness_;
};

/// Two-sided table of N x N Fourier coefficients, indices -K..K.
class FourierTable {
public:
    FourierTable(int block_size, int order);
    FourierTable(int block_size, int order, std::vector<ComplexMatrix> coeffs);

    int block_size() const noexcept { return n_; }
    int order() const noexcept { return order_; }

    const ComplexMatrix& operator[](int k) const;
    ComplexMatrix& operator[](int k);
    /// Coefficient k, or zero outside -K..K (treats the table as exact).
    ComplexMatrix coefficient_or_zero(int k) const;

    /// Largest entry magnitude over |k| in {K-1, K}.
    double tail_magnitude() const;
    /// Largest entry magnitude over |k| > band.
    double max_outside_band(int band) const;

    /// Table of the reflected symbol x -> sym(-x): k -> -k.
    FourierTable reflected() const;
    /// Table of z^{-shift} * sym: entry k becomes old entry k + shift.
    FourierTable shifted(int shift) const;
    FourierTable scalar_entry(int row, int col) const;

    /// Sum_k c_k e^{ikx}.
    ComplexMatrix evaluate(double x) const;
    MatrixSymbol to_symbol() const;

private:
    std::size_t index(int k) const;

    int n_;
    int order_;
    std::vector<ComplexMatrix> coeffs_;
};

struct LogDet {
    double log_modulus = 0.0;
    double phase = 0.0;  // (-pi, pi]
    bool is_singular = false;

    cplx log_value() const { return {log_modulus, phase}; }
    cplx value() const;
};

/// Product of determinants, phase reduced to (-pi, pi].
LogDet operator+(const LogDet& a, const LogDet& b);
/// Quotient of determinants.
LogDet operator-(const LogDet& a, const LogDet& b);

inline constexpr double kDefaultTailTolerance = 1e-13;

/// DFT of M uniform samples truncated to -K..K. Requires M a power of two with
/// M >= 4K + 4; throws TailNotResolved when the coefficients at |k| in
/// {K-1, K} exceed tail_tol.
FourierTable fourier_coefficients(const MatrixSymbol& sym, int grid_size, int order,
                                  double tail_tol = kDefaultTailTolerance);

/// nN x nN block matrix with block (j,k) = tab[j-k].
ComplexMatrix toeplitz_matrix(const FourierTable& tab, int n);
/// mN x mN block matrix with block (j,k) = tab[j+k+1].
ComplexMatrix hankel_matrix(const FourierTable& tab, int m);
/// Same as hankel_matrix, reading zero outside the table.
ComplexMatrix hankel_matrix_zero_extended(const FourierTable& tab, int m);
ComplexMatrix toeplitz_matrix_zero_extended(const FourierTable& tab, int n);

/// Partial-pivoting LU; singular when a pivot falls below n * eps * (max row norm).
LogDet log_determinant(const ComplexMatrix& a);

/// x -> sym(x)^{-1}; evaluation throws SingularSymbol where |det| < 1e-14.
MatrixSymbol pointwise_inverse(const MatrixSymbol& sym);

/// exp of the grid mean of log det sym(x) with the argument unwrapped along
/// the grid. Throws NonzeroWinding when the net argument change reaches pi.
cplx geometric_mean(const MatrixSymbol& sym, int grid_size);

/// Smallest power of two >= 4K + 4 (and >= minimum).
int grid_for_order(int order, int minimum = 64);

void require_finite(const ComplexMatrix& a, const char* what);

}  // namespace spectral
}  // namespace dimer
