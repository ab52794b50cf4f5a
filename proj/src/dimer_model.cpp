#include "dimer/dimer_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dimer {

void DimerParams::validate() const {
    if (!(t.real() > 0.0) || !std::isfinite(t.imag()))
        fail(ErrorCode::ParameterOutOfRange, "t must satisfy Re(t) > 0");
    if (quad_grid < 8) fail(ErrorCode::ParameterOutOfRange, "quad_grid must be >= 8");
    if (spectral.order < 1) fail(ErrorCode::ParameterOutOfRange, "spectral order must be >= 1");
    if (spectral.grid_size < 4 * spectral.order + 4 || (spectral.grid_size & (spectral.grid_size - 1)) != 0)
        fail(ErrorCode::ParameterOutOfRange, "spectral grid must be a power of two >= 4K+4");
    if (!(spectral.tail_tol > 0.0)) fail(ErrorCode::ParameterOutOfRange, "tail tolerance must be positive");
}

namespace model {

namespace {

constexpr double kQuadratureTol = 1e-10;

struct LineSums {
    std::vector<double> x;
    std::vector<cplx> cc, cs, one, jc, js;
};

// Inner y-sums of the tensor-product trapezoid rule; the outer x-sum is taken
// per coefficient.
LineSums line_sums(cplx t, int grid) {
    LineSums s;
    s.x.resize(grid);
    s.cc.assign(grid, 0.0);
    s.cs.assign(grid, 0.0);
    s.one.assign(grid, 0.0);
    s.jc.assign(grid, 0.0);
    s.js.assign(grid, 0.0);
    const cplx t2 = t * t;
    std::vector<double> cy(grid), sy(grid);
    for (int j = 0; j < grid; ++j) {
        const double y = -kPi + 2.0 * kPi * j / grid;
        cy[j] = std::cos(y);
        sy[j] = std::sin(y);
    }
    for (int i = 0; i < grid; ++i) {
        const double x = -kPi + 2.0 * kPi * i / grid;
        s.x[i] = x;
        const double cx = std::cos(x), sx = std::sin(x);
        cplx cc = 0.0, cs = 0.0, one = 0.0, jc = 0.0, js = 0.0;
        for (int j = 0; j < grid; ++j) {
            const double cxy = cx * cy[j] - sx * sy[j];
            const cplx inv = 1.0 / (cx * cx + cy[j] * cy[j] + t2 * (cxy * cxy));
            cc += cy[j] * cy[j] * inv;
            cs += cy[j] * sy[j] * inv;
            one += inv;
            jc += cxy * cy[j] * inv;
            js += cxy * sy[j] * inv;
        }
        s.cc[i] = cc;
        s.cs[i] = cs;
        s.one[i] = one;
        s.jc[i] = jc;
        s.js[i] = js;
    }
    return s;
}

cplx r_from_sums(const LineSums& s, cplx t, int k) {
    const int g = static_cast<int>(s.x.size());
    cplx acc = 0.0;
    const bool even = (k % 2 == 0);
    for (int i = 0; i < g; ++i) {
        const double ck = std::cos(k * s.x[i]), sk = std::sin(k * s.x[i]);
        acc += even ? (ck * s.cc[i] - sk * s.cs[i]) : (ck * s.jc[i] - sk * s.js[i]);
    }
    acc /= 2.0 * g * static_cast<double>(g);
    return even ? acc : t * acc;
}

cplx q_from_sums(const LineSums& s, int k) {
    if (k % 2 == 0) return 0.0;
    const int g = static_cast<int>(s.x.size());
    cplx acc = 0.0;
    for (int i = 0; i < g; ++i) acc += std::cos(s.x[i]) * std::cos(k * s.x[i]) * s.one[i];
    return acc / (2.0 * g * static_cast<double>(g));
}

void check_converged(cplx coarse, cplx fine, const char* name, int k) {
    if (std::abs(coarse - fine) > kQuadratureTol * std::max(1.0, std::abs(fine)))
        fail(ErrorCode::QuadratureUnconverged,
             std::string(name) + "_" + std::to_string(k) + " changed by " + std::to_string(std::abs(coarse - fine)) +
                 " when the quadrature grid was doubled");
}

}  // namespace

DimerCoefficients dimer_coefficients(const DimerParams& params, int k_min, int k_max) {
    params.validate();
    require(k_min <= k_max, ErrorCode::InvalidArgument, "empty coefficient range");
    const LineSums coarse = line_sums(params.t, params.quad_grid);
    const LineSums fine = line_sums(params.t, 2 * params.quad_grid);
    DimerCoefficients out{params.t, {}, {}};
    for (int k = k_min; k <= k_max; ++k) {
        const cplx r = r_from_sums(fine, params.t, k);
        check_converged(r_from_sums(coarse, params.t, k), r, "R", k);
        const cplx q = q_from_sums(fine, k);
        check_converged(q_from_sums(coarse, k), q, "Q", k);
        out.R[k] = r;
        out.Q[k] = q;
    }
    return out;
}

cplx coefficient_R(const DimerParams& params, int k) { return dimer_coefficients(params, k, k).R.at(k); }

cplx coefficient_Q(const DimerParams& params, int k) { return dimer_coefficients(params, k, k).Q.at(k); }

ComplexMatrix dimer_matrix(const DimerCoefficients& coeffs, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    const cplx t = coeffs.t;
    ComplexMatrix rm(n, n), qm(n, n);
    const cplx two_i(0.0, 2.0);
    for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
            cplx r = 2.0 * static_cast<double>(sign_power(floor_half(k - j))) * coeffs.R.at(k - j + 1);
            if (j > k) r += std::pow(t, j - k - 1);
            rm(j - 1, k - 1) = r;
            qm(j - 1, k - 1) = two_i * static_cast<double>(sign_power(floor_half(j + k))) * coeffs.Q.at(n + 1 - j - k);
        }
    }
    ComplexMatrix m(2 * n, 2 * n);
    m << rm, qm, qm, rm;
    return m;
}

ComplexMatrix dimer_matrix(const DimerParams& params, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    const auto coeffs = dimer_coefficients(params, std::min(2 - n, 1 - n), n);
    return dimer_matrix(coeffs, n);
}

cplx radical(cplx t, double x) {
    const double s = std::sin(x);
    const double s2 = s * s;
    return std::sqrt(t * t + s2 + s2 * s2);
}

cplx c_value(cplx t, double x) {
    const double s = std::sin(x);
    return (t * std::cos(x) + s * s) / ((std::polar(1.0, -x) - t) * radical(t, x));
}

cplx d_value(cplx t, double x) { return std::sin(x) / radical(t, x); }

spectral::MatrixSymbol symbol_phi(const DimerParams& params) {
    params.validate();
    const cplx t = params.t;
    if (t.imag() != 0.0 || !(t.real() > 0.0 && t.real() < 1.0))
        fail(ErrorCode::ParameterOutOfRange, "symbol_phi needs real 0 < t < 1; use the continuation module");
    return spectral::MatrixSymbol(2, [t](double x) {
        ComplexMatrix m(2, 2);
        m(0, 0) = c_value(t, x);
        m(0, 1) = d_value(t, x);
        m(1, 0) = d_value(t, -x);
        m(1, 1) = c_value(t, -x);
        return m;
    });
}

cplx p_value(cplx t, double x) {
    const double s = std::sin(x);
    return (t * std::cos(x) + s * s) * (t - std::polar(1.0, x));
}

cplx q_value(cplx t, double x) { return std::sin(x) * (1.0 - 2.0 * t * std::cos(x) + t * t); }

cplx sigma_value(cplx t, double x) { return 1.0 / (radical(t, x) * (1.0 - 2.0 * t * std::cos(x) + t * t)); }

spectral::MatrixSymbol symbol_psi(cplx t) {
    if (!(t.real() > 0.0)) fail(ErrorCode::ParameterOutOfRange, "t must satisfy Re(t) > 0");
    return spectral::MatrixSymbol(2, [t](double x) {
        ComplexMatrix m(2, 2);
        m(0, 0) = p_value(t, x);
        m(0, 1) = q_value(t, x);
        m(1, 0) = q_value(t, -x);
        m(1, 1) = p_value(t, -x);
        return m;
    });
}

namespace {

struct AppendixLine {
    cplx s_plus_t;
    cplx v;
};

AppendixLine appendix_line(cplx t, double x, int grid) {
    const cplx t2 = t * t;
    const double h = x - kPi / 2.0;
    const double ch = std::cos(h);
    const cplx i(0.0, 1.0);
    cplx s = 0.0, tt = 0.0, v = 0.0;
    for (int j = 0; j < grid; ++j) {
        const double y = -kPi + 2.0 * kPi * j / grid;
        const double cy = std::cos(y);
        const double a = x + y - kPi / 2.0;
        const double ca = std::cos(a);
        const cplx inv = 1.0 / (ch * ch + cy * cy + t2 * (ca * ca));
        s += ca * std::exp(i * a) * inv;
        tt += cy * std::exp(i * (x + y)) * inv;
        v += ch * inv;
    }
    const double w = 1.0 / (2.0 * grid);
    return {t * s * w - tt * w, v * w};
}

}  // namespace

AppendixSymbols appendix_symbols(const DimerParams& params) {
    params.validate();
    const cplx t = params.t;
    if (t.imag() != 0.0 || !(t.real() > 0.0 && t.real() < 1.0))
        fail(ErrorCode::ParameterOutOfRange, "appendix_symbols needs real 0 < t < 1");
    const int g = params.quad_grid;

    auto quad = [t, g](double x) {
        const AppendixLine coarse = appendix_line(t, x, g);
        const AppendixLine fine = appendix_line(t, x, 2 * g);
        if (std::abs(coarse.s_plus_t - fine.s_plus_t) > kQuadratureTol * std::max(1.0, std::abs(fine.s_plus_t)) ||
            std::abs(coarse.v - fine.v) > kQuadratureTol * std::max(1.0, std::abs(fine.v)))
            fail(ErrorCode::QuadratureUnconverged, "appendix line integral at x=" + std::to_string(x));
        return fine;
    };

    AppendixSymbols out;
    out.s_plus_t_quadrature = {[quad](double x) { return quad(x).s_plus_t; }};
    out.v_quadrature = {[quad](double x) { return quad(x).v; }};
    out.s_plus_t_closed = {[t](double x) {
        const double s = std::sin(x);
        const cplx den = 2.0 * (t - std::polar(1.0, -x));
        return -(t * std::cos(x) + s * s) / (den * radical(t, x)) + 1.0 / den;
    }};
    out.v_closed = {[t](double x) { return std::sin(x) / (2.0 * radical(t, x)); }};
    return out;
}

ComplexMatrix flip_conjugate(const ComplexMatrix& m, int n) {
    require(n >= 1 && m.rows() == 2 * n && m.cols() == 2 * n, ErrorCode::DimensionMismatch,
            "flip_conjugate needs a 2n x 2n matrix");
    ComplexMatrix out(2 * n, 2 * n);
    auto map = [n](Eigen::Index i) { return i < n ? i : 3 * n - 1 - i; };
    for (Eigen::Index r = 0; r < 2 * n; ++r)
        for (Eigen::Index c = 0; c < 2 * n; ++c) out(r, c) = m(map(r), map(c));
    return out;
}

cplx correlation_finite(const DimerParams& params, int n) {
    const auto ld = spectral::log_determinant(dimer_matrix(params, n));
    if (ld.is_singular) fail(ErrorCode::SingularDeterminant, "det M_n is numerically singular");
    cplx p = 0.5 * std::exp(0.5 * ld.log_value());
    if (params.t.imag() == 0.0) {
        if (std::abs(p.imag()) > 1e-10)
            fail(ErrorCode::InvariantViolation, "correlation has imaginary residue " + std::to_string(p.imag()));
        p = {p.real(), 0.0};
    }
    return p;
}

}  // namespace model
}  // namespace dimer
