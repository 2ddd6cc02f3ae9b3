// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace rissim {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Beamformers (M x K, column k serves user k) and one phase vector per RIS.
struct Design {
    CMat W;
    std::vector<CVec> theta;
};

// Per-pair precoders (M^t_k x d_k) and the phase vector of the single RIS.
struct SrDesign {
    std::vector<CMat> W;
    CVec theta;
};

struct IterationRecord {
    double objective = 0.0;
    double time_ms = 0.0;                 // cumulative wall time
    std::vector<double> block_objectives; // objective after each block update
};

struct IterationLog {
    std::vector<IterationRecord> iters;
    bool converged = false;
    int map_evaluations = 0; // number of outer BMM steps evaluated
};

} // namespace rissim
