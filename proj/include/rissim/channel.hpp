// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rissim/rng.hpp"
#include "rissim/types.hpp"

namespace rissim {

using Vec3 = std::array<double, 3>;

enum class SystemKind { miso, mimo };
enum class PowerModel { total, per_antenna, general };
enum class TopologyKind { cascade, paths, custom };

struct LinkParams {
    double exponent = 2.0;
    double rician_factor = 0.0;
};

struct NoiseSpec {
    std::optional<double> sigma2_w; // overrides the PSD form when present
    double psd_dbm_per_hz = -169.0;
    double bandwidth_hz = 240e3;
    double sigma2() const;
};

struct PowerConstraint {
    CMat omega; // Hermitian PSD weighting
    double power_w = 0.0;
};

struct Geometry {
    double distance_m = 200.0;
    Vec3 bs_position{0.0, 0.0, 10.0};
    // Empty means derived from distance_m: (d,0,10), (d/2,0,10), (d/4,0,10)
    // for MISO, (d,30,0) for MIMO.
    std::vector<Vec3> ris_positions;
    std::optional<Vec3> user_center;    // default (d,30,0)
    double user_radius_m = 10.0;
    std::optional<Vec3> tx_center;      // MIMO transmitters, default (0,0,10)
    double bs_spacing = 0.5;            // wavelengths
    double ris_spacing = 0.125;         // wavelengths
    double user_spacing = 0.5;          // MIMO terminal arrays
};

// Per user: list of paths, each an ordered list of 1-based RIS indices
// starting next to the BS.
struct ReflectionTopology {
    std::vector<std::vector<std::vector<int>>> paths;
    bool direct = true;

    int num_users() const { return static_cast<int>(paths.size()); }
};

struct SystemConfig {
    SystemKind kind = SystemKind::miso;
    int M = 4;                         // BS antennas (MIMO: transmit antennas per pair)
    int K = 4;                         // users (MIMO: pairs)
    std::vector<int> ris_elements{100};
    int rx_antennas = 4;               // MIMO only
    int streams = 0;                   // MIMO only; 0 means min(M^t, M^r)
    std::vector<double> weights;       // empty means all ones
    double power_w = 1e-3;             // total (MISO) or per transmitter (MIMO)
    PowerModel power_model = PowerModel::total;
    std::vector<PowerConstraint> general_power;
    NoiseSpec noise;
    Geometry geometry;
    LinkParams bs_ris{2.2, 3.0};
    LinkParams direct{3.5, 0.0};
    LinkParams ris_user{2.8, 3.0};
    std::optional<int> phase_bits;
    TopologyKind topology = TopologyKind::cascade;
    ReflectionTopology custom_topology;

    int L() const { return static_cast<int>(ris_elements.size()); }
    int num_streams() const;
    double weight(int k) const;
    double sigma2() const { return noise.sigma2(); }
    std::vector<Vec3> ris_positions() const;
    Vec3 user_center() const;
    Vec3 tx_center() const;
};

// Throws std::invalid_argument listing every violated field.
void validate(const SystemConfig &cfg);

// Power constraints implied by the config: empty for a single total budget,
// per-antenna diagonal selectors, or the explicit general list.
std::vector<PowerConstraint> power_constraints(const SystemConfig &cfg, int antennas, double budget);

// Phase alphabet {2 pi q / 2^b} for the configured bit depth (empty if continuous).
std::vector<double> phase_alphabet(const SystemConfig &cfg);

ReflectionTopology make_topology(const SystemConfig &cfg);
ReflectionTopology cascade_topology(int K, const std::vector<int> &order);
ReflectionTopology no_reflection_topology(int K);
void validate_topology(const ReflectionTopology &topo, int L);

// Transmission gains in channel terms: T0 * (d/d0)^-rho with T0 = 1e-3, d0 = 1 m.
double path_loss(double d, double rho);
CVec steering_ula(int n, double spacing, double sin_theta);
CVec steering_upa(int nx, int ny, double spacing, double az, double el);
// UPA layout for N elements: n x n when N is square, else ceil(sqrt(N)) rows.
std::pair<int, int> upa_shape(int N);
CMat rician_channel(int rows, int cols, double kappa, double k_factor, const CMat &los,
                    Philox4x64 &rng);

// Physical orientation: G0[i] is N_i x M (BS to RIS i), G[{i,j}] is N_j x N_i
// (RIS i to RIS j), hr[k][i] has length N_i, hd[k] has length M.
struct ChannelSetMiso {
    std::vector<CMat> G0;
    std::map<std::pair<int, int>, CMat> G;
    std::vector<std::vector<CVec>> hr;
    std::vector<CVec> hd;
    std::vector<Vec3> user_positions;

    int M() const { return hd.empty() ? 0 : static_cast<int>(hd[0].size()); }
    int K() const { return static_cast<int>(hd.size()); }
    int L() const { return static_cast<int>(G0.size()); }
};

// H_{k,j} = Hr[k] * diag(theta) * Gt[j] + Hd[k][j].
struct ChannelSetMimo {
    std::vector<CMat> Hr;              // M^r x N
    std::vector<CMat> Gt;              // N x M^t
    std::vector<std::vector<CMat>> Hd; // M^r x M^t
    std::vector<Vec3> tx_positions, rx_positions;

    int K() const { return static_cast<int>(Hr.size()); }
    int N() const { return Gt.empty() ? 0 : static_cast<int>(Gt[0].rows()); }
};

ChannelSetMiso generate_channels_miso(const SystemConfig &cfg, std::uint64_t seed);
ChannelSetMimo generate_channels_mimo(const SystemConfig &cfg, std::uint64_t seed);

// h_k = sum over paths of G0^T Theta G^T Theta ... h^r plus h^d.
CVec effective_channel_miso(int k, const Design &design, const ChannelSetMiso &ch,
                            const ReflectionTopology &topo);
// All users at once, column k is h_k.
CMat effective_channels(const Design &design, const ChannelSetMiso &ch,
                        const ReflectionTopology &topo);

struct AffineChannel {
    CMat F;    // M x N_l coefficient of theta_l
    CVec rest; // theta_l independent remainder
};
// l is 1-based. Throws if user k has no path through RIS l.
AffineChannel reflect_channel_matrix(int k, int l, const Design &design, const ChannelSetMiso &ch,
                                     const ReflectionTopology &topo);
bool user_uses_ris(int k, int l, const ReflectionTopology &topo);

// H_{k,j} for the current phases.
CMat mimo_link(int k, int j, const CVec &theta, const ChannelSetMimo &ch);

} // namespace rissim
