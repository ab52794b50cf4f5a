#include "dimer/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dimer::closed {

namespace {

void require_admissible(cplx t) {
    if (!(t.real() > 0.0) || !std::isfinite(t.imag()))
        fail(ErrorCode::ParameterOutOfRange, "t must satisfy Re(t) > 0");
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

double factorization_residual(const SpectralRoots& r, cplx y) {
    const cplx t2 = r.t * r.t;
    const cplx lhs = y * y - 8.0 * y + (14.0 + 16.0 * t2) - 8.0 / y + 1.0 / (y * y);
    const cplx rhs = (1.0 - r.xi1 * y) * (1.0 - r.xi2 * y) * (1.0 - r.xi1 / y) * (1.0 - r.xi2 / y) / (r.xi1 * r.xi2);
    return rel(rhs, lhs);
}

SpectralRoots spectral_roots(cplx t, RootPolicy policy) {
    require_admissible(t);
    SpectralRoots r;
    r.t = t;
    const cplx t2 = t * t;
    r.mu = std::sqrt(1.0 - 4.0 * t2);
    r.xi1 = 2.0 + r.mu - 2.0 * std::sqrt(1.0 - t2 + r.mu);
    r.xi2 = 2.0 - r.mu - 2.0 * std::sqrt(1.0 - t2 - r.mu);
    std::ostringstream log;
    log << "mu=" << fmt(r.mu) << " (principal sqrt); xi1 carries +mu, xi2 carries -mu";

    for (cplx* xi : {&r.xi1, &r.xi2}) {
        if (*xi == 0.0) fail(ErrorCode::InvariantViolation, "root vanished for t=" + fmt(t));
        if (std::abs(*xi) >= 1.0) {
            *xi = 1.0 / *xi;
            log << "; " << (xi == &r.xi1 ? "xi1" : "xi2") << " replaced by its reciprocal";
        }
    }
    r.branch_log = log.str();

    if (std::abs(r.xi1 - r.xi2) < 1e-8) {
        if (policy == RootPolicy::reject_degenerate)
            fail(ErrorCode::DegenerateRoots, "xi1 and xi2 coincide at t=" + fmt(t));
        r.branch_log += "; degenerate (xi1 = xi2)";
    }

    for (cplx xi : {r.xi1, r.xi2})
        if (!(std::abs(xi) < 1.0)) fail(ErrorCode::InvariantViolation, "root outside the unit disk");
    const cplx s1 = 4.0 + 2.0 * r.mu, s2 = 4.0 - 2.0 * r.mu;
    if (rel(r.xi1 + 1.0 / r.xi1, s1) > 1e-12 || rel(r.xi2 + 1.0 / r.xi2, s2) > 1e-12)
        fail(ErrorCode::InvariantViolation, "xi + 1/xi identity fails at t=" + fmt(t));
    for (int j = 0; j < 16; ++j) {
        const cplx y = std::polar(1.0, 2.0 * kPi * (j + 0.5) / 16.0);
        if (factorization_residual(r, y) > 1e-10)
            fail(ErrorCode::InvariantViolation, "quartic factorization fails at t=" + fmt(t));
    }
    return r;
}

KL kl_helpers(cplx t, cplx x) {
    const cplx t2 = t * t;
    const cplx d1 = 1.0 - t2 * x, d2 = 1.0 - x * x;
    if (std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12)
        fail(ErrorCode::PoleInput, "x=" + fmt(x) + " is a pole of k or l");
    KL out;
    out.k = (x * x - 4.0 * x - 1.0) / (d1 * d2);
    out.l = ((1.0 - 2.0 * t2) * x * x - (2.0 + 2.0 * t2) * x + 1.0) / (d1 * d2);
    if (rel(out.k + 2.0 / (1.0 - x), out.l) > 1e-12)
        fail(ErrorCode::InvariantViolation, "l identity fails at x=" + fmt(x));
    return out;
}

CoefficientBundle coefficient_bundle(const SpectralRoots& r) {
    const cplx t = r.t, x1 = r.xi1, x2 = r.xi2;
    if (std::abs(x1 - x2) < 1e-8) fail(ErrorCode::DegenerateRoots, "coefficient bundle needs distinct roots");
    const KL h1 = kl_helpers(t, x1), h2 = kl_helpers(t, x2);
    CoefficientBundle c;
    c.alpha = 4.0 * x1 * x2 / ((1.0 - x1 * x2) * (x1 - x2));
    c.a0 = t * c.alpha * (x1 * h1.k - x2 * h2.k);
    c.a1 = c.alpha * (h1.l - h2.l);
    c.am1 = c.alpha * (x1 * h1.l - x2 * h2.l);
    c.a2 = t * c.alpha * (h1.k - h2.k);
    c.am2 = t * c.alpha * (x1 * x1 * h1.k - x2 * x2 * h2.k);
    c.b1 = cplx(0.0, -8.0) * x1 * x2 / ((1.0 + x1) * (1.0 + x2) * (1.0 - x1 * x2));
    c.b2 = 0.0;
    c.omega = (1.0 - t * t * x1) * (1.0 - t * t * x2);
    return c;
}

CoefficientBundle coefficient_bundle(cplx t) { return coefficient_bundle(spectral_roots(t)); }

LambdaParts lambda_parts(const SpectralRoots& r) {
    const CoefficientBundle c = coefficient_bundle(r);
    const cplx t = r.t, x1 = r.xi1, x2 = r.xi2;
    LambdaParts out;

    const cplx b1sq = c.b1 * c.b1;
    out.long_form = c.a0 * c.a0 * c.a0 - 2.0 * (c.a1 * c.am1 + b1sq) * c.a0 - c.a2 * c.am2 * c.a0 +
                    c.am2 * (c.a1 * c.a1 - b1sq) + c.a2 * (c.am1 * c.am1 - b1sq);

    // sqrt(omega) = 4 / (t k(xi1) k(xi2) (1+xi1)(1+xi2)) holds without any
    // branch choice; it only serves to pick the sign of the principal root.
    const cplx principal = std::sqrt(c.omega);
    const cplx algebraic =
        4.0 / (t * kl_helpers(t, x1).k * kl_helpers(t, x2).k * (1.0 + x1) * (1.0 + x2));
    if (rel(algebraic * algebraic, c.omega) > 1e-9)
        fail(ErrorCode::InvariantViolation, "sqrt(omega) identity fails at t=" + fmt(t));
    const bool flip = std::abs(principal - algebraic) > std::abs(principal + algebraic);
    out.sqrt_omega = flip ? -principal : principal;
    out.branch_log = r.branch_log + (flip ? "; sqrt(omega) = -principal" : "; sqrt(omega) = principal");

    out.closed = 8.0 * r.mu * c.alpha * c.alpha * c.alpha * (x1 - x2) * (x1 - x2) /
                 (out.sqrt_omega * (1.0 + x1) * (1.0 + x2));
    if (std::abs(out.closed - out.long_form) > 1e-9 * std::max(1.0, std::abs(out.closed)))
        fail(ErrorCode::InvariantViolation, "closed and long forms of Lambda differ at t=" + fmt(t));
    return out;
}

cplx lambda_value(cplx t) {
    require_admissible(t);
    if (std::abs(t - 0.5) < 1e-3) fail(ErrorCode::DegenerateRoots, "Lambda is not evaluated within 1e-3 of t=1/2");
    return lambda_parts(spectral_roots(t)).closed;
}

cplx prefactor(cplx t) {
    const SpectralRoots r = spectral_roots(t, RootPolicy::allow_degenerate);
    const cplx x1 = r.xi1, x2 = r.xi2, t2 = t * t;
    return (1.0 - x1 * x1) * (1.0 - x2 * x2) * (1.0 - x1 * x2) * (1.0 - x1 * x2) * (1.0 - t2 * x1) * (1.0 - t2 * x2);
}

cplx e_phi(cplx t) {
    require_admissible(t);
    const cplx t2 = t * t;
    return t / (2.0 * t * (2.0 + t2) + (1.0 + 2.0 * t2) * std::sqrt(2.0 + t2));
}

cplx correlation_limit(cplx t) { return 0.5 * std::sqrt(e_phi(t)); }

}  // namespace dimer::closed
