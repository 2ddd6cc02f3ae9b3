// SPDX-License-Identifier: Apache-2.0
#include "rissim/surrogates.hpp"

#include <cmath>
#include <stdexcept>

#include "rissim/numerics.hpp"

namespace rissim {

double ScalarMinorizer::operator()(cd x, double y) const {
    return -a * (y + std::norm(x)) + 2.0 * std::real(std::conj(b) * x) + c0;
}

ScalarMinorizer scalar_rate_minorizer(cd x, double y) {
    if (!(y > 0.0))
        throw std::invalid_argument("scalar_rate_minorizer: y must be positive");
    const double s = std::norm(x) / y;
    ScalarMinorizer m;
    m.a = std::norm(x) / (y * (y + std::norm(x)));
    m.b = x / y;
    m.c0 = std::log1p(s) - s;
    return m;
}

double SinrMinorizer::operator()(cd z1, double z2) const {
    return 2.0 * std::real(std::conj(b) * z1) - a * z2;
}

SinrMinorizer sinr_minorizer(cd z1, double z2) {
    if (!(z2 > 0.0))
        throw std::invalid_argument("sinr_minorizer: z2 must be positive");
    return {z1 / z2, std::norm(z1) / (z2 * z2)};
}

double LinearizedForm::operator()(const CVec &theta) const {
    return -2.0 * theta.dot(b).real() + c0;
}

LinearizedForm quadratic_to_linear(const CMat &L, double lambda, const CVec &x) {
    const Eigen::Index n = L.rows();
    if (n != L.cols() || n != x.size())
        throw std::invalid_argument("quadratic_to_linear: dimension mismatch");
    const CMat shifted = lambda * CMat::Identity(n, n) - L;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (shifted + shifted.adjoint()), Eigen::EigenvaluesOnly);
    if (n > 0 && es.eigenvalues()(0) < -1e-8 * std::max(1.0, L.norm()))
        throw std::invalid_argument("quadratic_to_linear: invalid shift");
    LinearizedForm f;
    f.b = L * x - lambda * x;
    f.c0 = -lambda * static_cast<double>(n) - x.dot(shifted * x).real();
    return f;
}

double quadratic_majorizer_value(const CMat &L, double lambda, const CVec &xa, const CVec &x) {
    const CMat shifted = lambda * CMat::Identity(L.rows(), L.cols()) - L;
    return lambda * x.squaredNorm() - 2.0 * x.dot(shifted * xa).real() + xa.dot(shifted * xa).real();
}

double MatrixMinorizer::operator()(const CMat &X, const CMat &Y) const {
    return -(A * (Y + X * X.adjoint())).trace().real() + 2.0 * (B * X).trace().real() + c0;
}

MatrixMinorizer matrix_rate_minorizer(const CMat &X, const CMat &Y) {
    if (Y.rows() != Y.cols() || Y.rows() != X.rows())
        throw std::invalid_argument("matrix_rate_minorizer: dimension mismatch");
    Eigen::LLT<CMat> ly(Y);
    if (ly.info() != Eigen::Success)
        throw std::invalid_argument("matrix_rate_minorizer: Y is singular or not positive definite");
    const Eigen::Index d = X.cols();
    const CMat YiX = ly.solve(X);
    const CMat XYX = X.adjoint() * YiX;
    const CMat E = CMat::Identity(d, d) + 0.5 * (XYX + XYX.adjoint());
    const CMat S = Y + X * X.adjoint();
    Eigen::LLT<CMat> ls(S);
    // S^-1 X, then B = E X^H S^-1 = E (S^-1 X)^H since S is Hermitian.
    const CMat SiX = ls.solve(X);
    MatrixMinorizer m;
    m.B = E * SiX.adjoint();
    const CMat A = SiX * E * SiX.adjoint();
    m.A = 0.5 * (A + A.adjoint());
    m.c0 = logdet_hpd(E) - XYX.trace().real();
    return m;
}

double logdet_rate(const CMat &X, const CMat &Y) {
    Eigen::LLT<CMat> ly(Y);
    if (ly.info() != Eigen::Success)
        throw std::invalid_argument("logdet_rate: Y is not positive definite");
    const CMat Z = ly.matrixL().solve(X);
    const Eigen::Index d = X.cols();
    return logdet_hpd(CMat::Identity(d, d) + Z.adjoint() * Z);
}

} // namespace rissim
