#pragma once

// Root algebra of t^2 + sin^2 x + sin^4 x and the explicit constants built on it.

#include <string>

#include "dimer/spectral_core.hpp"

namespace dimer::closed {

struct SpectralRoots {
    cplx t;
    cplx mu;
    cplx xi1;
    cplx xi2;
    std::string branch_log;
};

enum class RootPolicy { reject_degenerate, allow_degenerate };

/// mu = sqrt(1 - 4t^2), xi1 = 2 + mu - 2 sqrt(1 - t^2 + mu),
/// xi2 = 2 - mu - 2 sqrt(1 - t^2 - mu), principal branches, a root with
/// |xi| >= 1 replaced by its reciprocal. Validates |xi| < 1, the
/// xi + 1/xi identities and the quartic factorization (InvariantViolation).
SpectralRoots spectral_roots(cplx t, RootPolicy policy = RootPolicy::reject_degenerate);

/// Residual of y^2 - 8y + (14 + 16t^2) - 8/y + 1/y^2 against its product form.
double factorization_residual(const SpectralRoots& r, cplx y);

struct KL {
    cplx k;
    cplx l;
};

/// k(x) = (x^2 - 4x - 1) / ((1 - t^2 x)(1 - x^2)) and l from its own rational
/// form, checked against k + 2/(1 - x). PoleInput near x = +-1 or 1/t^2.
KL kl_helpers(cplx t, cplx x);

struct CoefficientBundle {
    cplx a0, a1, am1, a2, am2;
    cplx b1, b2;
    cplx alpha;
    cplx omega;
};

CoefficientBundle coefficient_bundle(const SpectralRoots& roots);
CoefficientBundle coefficient_bundle(cplx t);

struct LambdaParts {
    cplx closed;
    cplx long_form;
    cplx sqrt_omega;
    std::string branch_log;
};

/// Both forms of Lambda from a root bundle; labels may be swapped by the caller.
/// Throws InvariantViolation if they differ by more than 1e-9 relative.
LambdaParts lambda_parts(const SpectralRoots& roots);

/// Refuses |t - 1/2| < 1e-3 with DegenerateRoots.
cplx lambda_value(cplx t);

/// (1 - xi1^2)(1 - xi2^2)(1 - xi1 xi2)^2 (1 - t^2 xi1)(1 - t^2 xi2)
cplx prefactor(cplx t);

/// t / (2t(2 + t^2) + (1 + 2t^2) sqrt(2 + t^2))
cplx e_phi(cplx t);

/// sqrt(e_phi(t)) / 2
cplx correlation_limit(cplx t);

}  // namespace dimer::closed
