// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rissim/types.hpp"

namespace rissim {

// g(x, y) = -a (y + |x|^2) + 2 Re(conj(b) x) + c0, a lower bound on
// log(1 + |x|^2 / y) that is tight at the anchor.
struct ScalarMinorizer {
    double a = 0.0;
    cd b{0.0, 0.0};
    double c0 = 0.0;
    double operator()(cd x, double y) const;
};

ScalarMinorizer scalar_rate_minorizer(cd x_anchor, double y_anchor);

// |z1|^2 / z2 >= 2 Re(conj(b) z1) - a z2 with b = z1_/z2_, a = |z1_|^2 / z2_^2.
struct SinrMinorizer {
    cd b{0.0, 0.0};
    double a = 0.0;
    double operator()(cd z1, double z2) const;
};

SinrMinorizer sinr_minorizer(cd z1_anchor, double z2_anchor);

// g(theta) = -2 Re(theta^H b) + c0
struct LinearizedForm {
    CVec b;
    double c0 = 0.0;
    double operator()(const CVec &theta) const;
};

// Lower bound of -x^H L x on the unit-modulus set, tangent at x_anchor, from
// x^H L x <= lambda ||x||^2 + 2 Re(x^H (L - lambda I) x_) + x_^H (lambda I - L) x_.
// Throws "invalid shift" if lambda is below lambda_max(L) beyond 1e-8 slack.
LinearizedForm quadratic_to_linear(const CMat &L, double lambda, const CVec &x_anchor);

// Value of the upper bound above at x (any x, not only unit modulus).
double quadratic_majorizer_value(const CMat &L, double lambda, const CVec &x_anchor, const CVec &x);

// g(X, Y) = -tr(A (Y + X X^H)) + 2 Re tr(B X) + c0, a lower bound on
// log det(I + X^H Y^-1 X) tight at (X_, Y_).
struct MatrixMinorizer {
    CMat A;
    CMat B;
    double c0 = 0.0;
    double operator()(const CMat &X, const CMat &Y) const;
};

MatrixMinorizer matrix_rate_minorizer(const CMat &X_anchor, const CMat &Y_anchor);

// log det(I + X^H Y^-1 X) via Cholesky of Y.
double logdet_rate(const CMat &X, const CMat &Y);

} // namespace rissim
