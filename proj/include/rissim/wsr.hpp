// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rissim/channel.hpp"
#include "rissim/solver_options.hpp"
#include "rissim/surrogates.hpp"
#include "rissim/types.hpp"

namespace rissim {

// Per-user received amplitudes for beamformers W (M x K) and channels H (M x K).
struct SinrTerms {
    CVec signal;       // w_k^H h_k
    RVec interference; // sum_{j != k} |w_j^H h_k|^2 + sigma^2
    RVec sinr;
};
SinrTerms sinr_terms(const CMat &W, const CMat &H, double sigma2);

double wsr_objective(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                     const SystemConfig &cfg);
double wsr_objective(const CMat &W, const CMat &H, double sigma2, const RVec &weights);
// Weighted sum of SINRs.
double sinr_objective(const CMat &W, const CMat &H, double sigma2, const RVec &weights);

RVec user_weights(const SystemConfig &cfg);

struct WsrCoeffs {
    RVec alpha;
    CVec beta;
    RVec rate;
    RVec sinr;
};
WsrCoeffs compute_wsr_coeffs(const CMat &W, const CMat &H, double sigma2);
WsrCoeffs compute_wsr_coeffs(const Design &design, const ChannelSetMiso &ch,
                             const ReflectionTopology &topo, const SystemConfig &cfg);

// Minorizer expressed in the received amplitudes a_jk = w_j^H h_k:
//   -sum_{k,j} c(k,j) |a_jk|^2 + 2 Re sum_k lin_k a_kk + c0.
// The rate objective gives c(k,j) = w_k alpha_k for all j (a shared quadratic
// across beamformers); the SINR objective drops the j = k terms.
struct MisoSurrogate {
    RMat c;
    CVec lin;
    double c0 = 0.0;
    bool shared = true;
};
MisoSurrogate rate_surrogate(const WsrCoeffs &coeffs, const RVec &weights, double sigma2);
MisoSurrogate sinr_surrogate(const CMat &W, const CMat &H, double sigma2, const RVec &weights);
double surrogate_value(const MisoSurrogate &s, const CMat &W, const CMat &H);

struct WQuadratic {
    CMat R; // shared quadratic
    CMat Q;
};
// R = sum_k w_k alpha_k h_k h_k^H, Q(:,k) = w_k beta_k h_k.
WQuadratic build_w_quadratic(const WsrCoeffs &coeffs, const CMat &H, const RVec &weights);
// Per-beamformer quadratics R_j = sum_k c(k,j) h_k h_k^H and Q(:,j) = lin_j h_j.
std::vector<CMat> column_quadratics(const MisoSurrogate &s, const CMat &H);

// argmin tr(W^H R W) - 2 Re tr(W^H Q) s.t. ||W||_F^2 <= P.
CMat solve_w_total_power(const CMat &R, const CMat &Q, double P);
// Same objective summed over columns with column-specific R_j.
CMat solve_w_columns_total(const std::vector<CMat> &R, const CMat &Q, double P);
// Line-search-free step: majorize R by c_sigma I around W_anchor, then scale
// onto the power ball. c_sigma = tr(R) for the shared rate quadratic.
CMat solve_w_closed_form(const CMat &R, const CMat &Q, const WsrCoeffs &coeffs, const CMat &W_anchor,
                         const CMat &H, const RVec &weights, double P);
CMat solve_w_closed_form_columns(const std::vector<CMat> &R, const CMat &Q, const CMat &W_anchor,
                                 double P, const std::vector<PowerConstraint> &constraints = {});
// argmin with tr(Omega_j W W^H) <= P_j for every constraint.
CMat solve_w_general_power(const CMat &R, const CMat &Q, const std::vector<PowerConstraint> &constraints);
CMat solve_w_columns_general(const std::vector<CMat> &R, const CMat &Q,
                             const std::vector<PowerConstraint> &constraints);

// Power feasibility helpers.
bool power_feasible(const CMat &W, double P, const std::vector<PowerConstraint> &constraints,
                    double rel_tol = 1e-9);
CMat project_power(const CMat &W, double P, const std::vector<PowerConstraint> &constraints);

// Phase block for RIS l (1-based).
struct ThetaSurrogate {
    CVec b;          // linearized coefficient (minimize Re(theta^H b))
    CVec c;          // linear term of the quadratic surrogate
    double lambda;   // shift, >= lambda_max(L)
    CMat F_stack;    // N x (K*K) columns u_kj = F_k^H w_j, scaled by sqrt(c(k,j))
    double c0 = 0.0; // linearized surrogate value offset
};
ThetaSurrogate theta_surrogate(int l, const Design &design, const MisoSurrogate &s,
                               const ChannelSetMiso &ch, const ReflectionTopology &topo);
LinearizedForm build_theta_linear(int l, const Design &design, const WsrCoeffs &coeffs,
                                  const ChannelSetMiso &ch, const ReflectionTopology &topo,
                                  const SystemConfig &cfg);
// Quadratic surrogate value -theta^H L theta + 2 Re(theta^H c) + const at theta,
// tangent to the objective surrogate at the anchor phases.
double theta_quadratic_value(const ThetaSurrogate &ts, const CVec &theta_anchor, double anchor_value,
                             const CVec &theta);

CVec solve_theta_unimodulus(const CVec &b, const CVec *fallback = nullptr);
CVec solve_theta_discrete(const CVec &b, const std::vector<double> &alphabet);
CVec project_phases(const CVec &theta, const std::vector<double> &alphabet);

CVec update_theta_serial(int l, const Design &design, const WsrCoeffs &coeffs, const ChannelSetMiso &ch,
                         const ReflectionTopology &topo, const SystemConfig &cfg);
CVec update_theta_serial(int l, const Design &design, const MisoSurrogate &s, const ChannelSetMiso &ch,
                         const ReflectionTopology &topo, const std::vector<double> &alphabet);

// Matched beamformers on the direct channels and random phases drawn from
// the (seed, init) stream.
Design default_init(const SystemConfig &cfg, const ChannelSetMiso &ch, std::uint64_t seed);

struct WsrResult {
    Design design;
    IterationLog log;
};

WsrResult run_wsr_bmm(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                      const SolverOptions &opts, const Design &init);

// One outer iteration (W block, then each phase block).
Design wsr_outer_step(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                      const SolverOptions &opts, const Design &x, std::vector<double> *block_objs = nullptr);

double miso_objective(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                      const SystemConfig &cfg, ObjectiveKind kind);

} // namespace rissim
