#include "dimer/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/FFT>

namespace dimer {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::TailNotResolved: return "TailNotResolved";
        case ErrorCode::SampleFailure: return "SampleFailure";
        case ErrorCode::TruncationTooShort: return "TruncationTooShort";
        case ErrorCode::SingularSymbol: return "SingularSymbol";
        case ErrorCode::NonzeroWinding: return "NonzeroWinding";
        case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrorCode::QuadratureUnconverged: return "QuadratureUnconverged";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingularDeterminant: return "SingularDeterminant";
        case ErrorCode::NotBanded: return "NotBanded";
        case ErrorCode::TruncatedOperatorSingular: return "TruncatedOperatorSingular";
        case ErrorCode::BranchFailure: return "BranchFailure";
        case ErrorCode::DegenerateRoots: return "DegenerateRoots";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::PoleInput: return "PoleInput";
        case ErrorCode::DecompositionMismatch: return "DecompositionMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_parameter_error(ErrorCode code) noexcept {
    return code == ErrorCode::ParameterOutOfRange || code == ErrorCode::InvalidArgument ||
           code == ErrorCode::DimensionMismatch || code == ErrorCode::PoleInput;
}

namespace spectral {

namespace {

double wrap_phase(double phase) {
    double r = std::remainder(phase, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

void require_finite(const ComplexMatrix& a, const char* what) {
    if (!a.allFinite()) fail(ErrorCode::SampleFailure, std::string(what) + " has non-finite entries");
}

// ---------------------------------------------------------------- MatrixSymbol

MatrixSymbol::MatrixSymbol(int block_size, Evaluator evaluator, Smoothness smoothness)
    : n_(block_size), eval_(std::move(evaluator)), smoothness_(smoothness) {
    require(n_ >= 1, ErrorCode::InvalidArgument, "block size must be positive");
}

MatrixSymbol MatrixSymbol::from_scalar(const ScalarSymbol& s) {
    auto f = s.evaluator;
    return MatrixSymbol(
        1,
        [f](double x) {
            ComplexMatrix m(1, 1);
            m(0, 0) = f(x);
            return m;
        },
        s.smoothness);
}

MatrixSymbol MatrixSymbol::from_entries(int block_size, std::vector<ScalarSymbol> entries) {
    require(static_cast<int>(entries.size()) == block_size * block_size, ErrorCode::DimensionMismatch,
            "entry count does not match block size");
    Smoothness sm = Smoothness::analytic_in_annulus;
    for (const auto& e : entries)
        if (e.smoothness == Smoothness::wiener_class) sm = Smoothness::wiener_class;
    return MatrixSymbol(
        block_size,
        [block_size, entries = std::move(entries)](double x) {
            ComplexMatrix m(block_size, block_size);
            for (int r = 0; r < block_size; ++r)
                for (int c = 0; c < block_size; ++c) m(r, c) = entries[r * block_size + c](x);
            return m;
        },
        sm);
}

ComplexMatrix MatrixSymbol::operator()(double x) const { return eval_(x); }

ScalarSymbol MatrixSymbol::entry(int row, int col) const {
    require(row >= 0 && row < n_ && col >= 0 && col < n_, ErrorCode::InvalidArgument, "entry index out of range");
    auto f = eval_;
    return {[f, row, col](double x) { return f(x)(row, col); }, smoothness_};
}

MatrixSymbol MatrixSymbol::reflected() const {
    auto f = eval_;
    return MatrixSymbol(n_, [f](double x) { return f(-x); }, smoothness_);
}

MatrixSymbol MatrixSymbol::times(const MatrixSymbol& rhs) const {
    require(rhs.n_ == n_, ErrorCode::DimensionMismatch, "block sizes differ");
    auto f = eval_;
    auto g = rhs.eval_;
    Smoothness sm = (smoothness_ == Smoothness::wiener_class || rhs.smoothness_ == Smoothness::wiener_class)
                        ? Smoothness::wiener_class
                        : Smoothness::analytic_in_annulus;
    return MatrixSymbol(n_, [f, g](double x) -> ComplexMatrix { return f(x) * g(x); }, sm);
}

MatrixSymbol MatrixSymbol::scaled(const ScalarSymbol& s) const {
    auto f = eval_;
    auto g = s.evaluator;
    return MatrixSymbol(n_, [f, g](double x) -> ComplexMatrix { return g(x) * f(x); }, smoothness_);
}

std::vector<ComplexMatrix> MatrixSymbol::sample(int grid_size) const {
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(grid_size));
    for (int j = 0; j < grid_size; ++j) out.push_back(eval_(2.0 * kPi * j / grid_size));
    return out;
}

// ---------------------------------------------------------------- FourierTable

FourierTable::FourierTable(int block_size, int order)
    : n_(block_size), order_(order),
      coeffs_(static_cast<std::size_t>(2 * order + 1), ComplexMatrix::Zero(block_size, block_size)) {
    require(block_size >= 1 && order >= 0, ErrorCode::InvalidArgument, "bad FourierTable shape");
}

FourierTable::FourierTable(int block_size, int order, std::vector<ComplexMatrix> coeffs)
    : n_(block_size), order_(order), coeffs_(std::move(coeffs)) {
    require(static_cast<int>(coeffs_.size()) == 2 * order + 1, ErrorCode::DimensionMismatch,
            "coefficient count must be 2K+1");
    for (const auto& c : coeffs_)
        require(c.rows() == n_ && c.cols() == n_, ErrorCode::DimensionMismatch, "coefficient block size");
}

std::size_t FourierTable::index(int k) const {
    if (k < -order_ || k > order_)
        fail(ErrorCode::TruncationTooShort,
             "coefficient " + std::to_string(k) + " outside table of order " + std::to_string(order_));
    return static_cast<std::size_t>(k + order_);
}

const ComplexMatrix& FourierTable::operator[](int k) const { return coeffs_[index(k)]; }
ComplexMatrix& FourierTable::operator[](int k) { return coeffs_[index(k)]; }

ComplexMatrix FourierTable::coefficient_or_zero(int k) const {
    if (k < -order_ || k > order_) return ComplexMatrix::Zero(n_, n_);
    return coeffs_[static_cast<std::size_t>(k + order_)];
}

double FourierTable::tail_magnitude() const {
    double m = 0.0;
    for (int k : {order_ - 1, order_}) {
        if (k < 0) continue;
        m = std::max(m, (*this)[k].cwiseAbs().maxCoeff());
        m = std::max(m, (*this)[-k].cwiseAbs().maxCoeff());
    }
    return m;
}

double FourierTable::max_outside_band(int band) const {
    double m = 0.0;
    for (int k = band + 1; k <= order_; ++k) {
        m = std::max(m, (*this)[k].cwiseAbs().maxCoeff());
        m = std::max(m, (*this)[-k].cwiseAbs().maxCoeff());
    }
    return m;
}

FourierTable FourierTable::reflected() const {
    FourierTable out(n_, order_);
    for (int k = -order_; k <= order_; ++k) out[k] = (*this)[-k];
    return out;
}

FourierTable FourierTable::shifted(int shift) const {
    FourierTable out(n_, order_);
    for (int k = -order_; k <= order_; ++k) out[k] = coefficient_or_zero(k + shift);
    return out;
}

FourierTable FourierTable::scalar_entry(int row, int col) const {
    FourierTable out(1, order_);
    for (int k = -order_; k <= order_; ++k) out[k](0, 0) = (*this)[k](row, col);
    return out;
}

ComplexMatrix FourierTable::evaluate(double x) const {
    ComplexMatrix acc = ComplexMatrix::Zero(n_, n_);
    for (int k = -order_; k <= order_; ++k) acc += std::polar(1.0, k * x) * (*this)[k];
    return acc;
}

MatrixSymbol FourierTable::to_symbol() const {
    FourierTable copy = *this;
    return MatrixSymbol(n_, [copy](double x) { return copy.evaluate(x); });
}

// ---------------------------------------------------------------- LogDet

cplx LogDet::value() const {
    if (is_singular) return {0.0, 0.0};
    return std::exp(log_value());
}

LogDet operator+(const LogDet& a, const LogDet& b) {
    return {a.log_modulus + b.log_modulus, wrap_phase(a.phase + b.phase), a.is_singular || b.is_singular};
}

LogDet operator-(const LogDet& a, const LogDet& b) {
    return {a.log_modulus - b.log_modulus, wrap_phase(a.phase - b.phase), a.is_singular || b.is_singular};
}

// ---------------------------------------------------------------- operations

int grid_for_order(int order, int minimum) {
    int m = std::max(minimum, 4);
    while (m < 4 * order + 4) m *= 2;
    return m;
}

FourierTable fourier_coefficients(const MatrixSymbol& sym, int grid_size, int order, double tail_tol) {
    require(order >= 0, ErrorCode::InvalidArgument, "order must be non-negative");
    require(is_power_of_two(grid_size), ErrorCode::InvalidArgument, "grid size must be a power of two");
    require(grid_size >= 4 * order + 4, ErrorCode::InvalidArgument,
            "grid size " + std::to_string(grid_size) + " < 4K+4 for K=" + std::to_string(order));

    const int n = sym.block_size();
    const auto samples = sym.sample(grid_size);
    for (int j = 0; j < grid_size; ++j) {
        if (samples[j].rows() != n || samples[j].cols() != n)
            fail(ErrorCode::DimensionMismatch, "evaluator returned wrong block size");
        if (!samples[j].allFinite())
            fail(ErrorCode::SampleFailure,
                 "non-finite sample at x=" + std::to_string(2.0 * kPi * j / grid_size));
    }

    FourierTable tab(n, order);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(static_cast<std::size_t>(grid_size));
    std::vector<cplx> out;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            for (int j = 0; j < grid_size; ++j) in[j] = samples[j](r, c);
            fft.fwd(out, in);
            for (int k = -order; k <= order; ++k) {
                int idx = ((k % grid_size) + grid_size) % grid_size;
                tab[k](r, c) = out[idx] / static_cast<double>(grid_size);
            }
        }
    }

    const double tail = tab.tail_magnitude();
    if (tail > tail_tol)
        fail(ErrorCode::TailNotResolved, "coefficient tail " + std::to_string(tail) + " exceeds " +
                                             std::to_string(tail_tol) + " at K=" + std::to_string(order));
    return tab;
}

ComplexMatrix toeplitz_matrix(const FourierTable& tab, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    require(n - 1 <= tab.order(), ErrorCode::TruncationTooShort,
            "Toeplitz size " + std::to_string(n) + " needs order >= " + std::to_string(n - 1));
    return toeplitz_matrix_zero_extended(tab, n);
}

ComplexMatrix toeplitz_matrix_zero_extended(const FourierTable& tab, int n) {
    const int b = tab.block_size();
    ComplexMatrix a(n * b, n * b);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a.block(j * b, k * b, b, b) = tab.coefficient_or_zero(j - k);
    return a;
}

ComplexMatrix hankel_matrix(const FourierTable& tab, int m) {
    require(m >= 1, ErrorCode::InvalidArgument, "m must be positive");
    require(2 * m - 1 <= tab.order(), ErrorCode::TruncationTooShort,
            "Hankel size " + std::to_string(m) + " needs order >= " + std::to_string(2 * m - 1));
    return hankel_matrix_zero_extended(tab, m);
}

ComplexMatrix hankel_matrix_zero_extended(const FourierTable& tab, int m) {
    const int b = tab.block_size();
    ComplexMatrix a(m * b, m * b);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) a.block(j * b, k * b, b, b) = tab.coefficient_or_zero(j + k + 1);
    return a;
}

LogDet log_determinant(const ComplexMatrix& a) {
    require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "log_determinant needs a square matrix");
    const Eigen::Index n = a.rows();
    if (n == 0) return {};
    require_finite(a, "log_determinant input");

    const double max_row_norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    const double threshold = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_row_norm;

    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const ComplexMatrix& packed = lu.matrixLU();

    LogDet out;
    double phase = lu.permutationP().determinant() < 0 ? kPi : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx pivot = packed(i, i);
        const double mag = std::abs(pivot);
        if (!(mag >= threshold) || mag == 0.0) {
            out.is_singular = true;
            out.log_modulus = -std::numeric_limits<double>::infinity();
            out.phase = 0.0;
            return out;
        }
        out.log_modulus += std::log(mag);
        phase += std::arg(pivot);
    }
    out.phase = wrap_phase(phase);
    return out;
}

MatrixSymbol pointwise_inverse(const MatrixSymbol& sym) {
    const int n = sym.block_size();
    require(n <= 2, ErrorCode::InvalidArgument, "pointwise_inverse supports N <= 2");
    return MatrixSymbol(
        n,
        [sym, n](double x) {
            ComplexMatrix m = sym(x);
            ComplexMatrix inv(n, n);
            if (n == 1) {
                if (std::abs(m(0, 0)) < 1e-14)
                    fail(ErrorCode::SingularSymbol, "symbol vanishes at x=" + std::to_string(x));
                inv(0, 0) = 1.0 / m(0, 0);
                return inv;
            }
            const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            if (std::abs(det) < 1e-14)
                fail(ErrorCode::SingularSymbol, "det symbol vanishes at x=" + std::to_string(x));
            inv(0, 0) = m(1, 1) / det;
            inv(0, 1) = -m(0, 1) / det;
            inv(1, 0) = -m(1, 0) / det;
            inv(1, 1) = m(0, 0) / det;
            return inv;
        },
        sym.smoothness());
}

cplx geometric_mean(const MatrixSymbol& sym, int grid_size) {
    require(grid_size >= 2, ErrorCode::InvalidArgument, "grid too small");
    double log_mod_sum = 0.0;
    double arg_sum = 0.0;
    double prev_arg = 0.0;
    double first_arg = 0.0;
    for (int j = 0; j <= grid_size; ++j) {
        const ComplexMatrix m = sym(2.0 * kPi * j / grid_size);
        const cplx d = m.determinant();
        if (!std::isfinite(d.real()) || !std::isfinite(d.imag()) || std::abs(d) < 1e-14)
            fail(ErrorCode::SingularSymbol, "det symbol vanishes or is non-finite on the grid");
        double a = std::arg(d);
        if (j == 0) {
            first_arg = a;
        } else {
            // nearest-branch continuation
            a = prev_arg + std::remainder(a - prev_arg, 2.0 * kPi);
        }
        prev_arg = a;
        if (j < grid_size) {
            log_mod_sum += std::log(std::abs(d));
            arg_sum += a;
        }
    }
    const double total_change = prev_arg - first_arg;
    if (std::abs(total_change) >= kPi)
        fail(ErrorCode::NonzeroWinding, "argument of det symbol changes by " + std::to_string(total_change));
    return std::exp(cplx(log_mod_sum, arg_sum) / static_cast<double>(grid_size));
}

}  // namespace spectral
}  // namespace dimer
