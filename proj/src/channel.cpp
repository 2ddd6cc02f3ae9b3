// SPDX-License-Identifier: Apache-2.0
#include "rissim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rissim {

double NoiseSpec::sigma2() const {
    if (sigma2_w)
        return *sigma2_w;
    return std::pow(10.0, (psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) - 30.0) / 10.0);
}

int SystemConfig::num_streams() const {
    const int cap = std::min(M, rx_antennas);
    return streams > 0 ? streams : cap;
}

double SystemConfig::weight(int k) const {
    return weights.empty() ? 1.0 : weights.at(static_cast<std::size_t>(k));
}

std::vector<Vec3> SystemConfig::ris_positions() const {
    if (!geometry.ris_positions.empty())
        return geometry.ris_positions;
    const double d = geometry.distance_m;
    std::vector<Vec3> out;
    if (kind == SystemKind::mimo) {
        for (int i = 0; i < L(); ++i)
            out.push_back({d, 30.0, 0.0});
        return out;
    }
    double x = d;
    for (int i = 0; i < L(); ++i, x *= 0.5)
        out.push_back({x, 0.0, 10.0});
    return out;
}

Vec3 SystemConfig::user_center() const {
    return geometry.user_center ? *geometry.user_center : Vec3{geometry.distance_m, 30.0, 0.0};
}

Vec3 SystemConfig::tx_center() const {
    return geometry.tx_center ? *geometry.tx_center : Vec3{0.0, 0.0, 10.0};
}

void validate(const SystemConfig &cfg) {
    std::vector<std::string> bad;
    if (cfg.M < 1)
        bad.emplace_back("M must be >= 1");
    if (cfg.K < 1)
        bad.emplace_back("K must be >= 1");
    for (int n : cfg.ris_elements)
        if (n < 1)
            bad.emplace_back("ris_elements entries must be >= 1");
    if (!cfg.weights.empty()) {
        if (static_cast<int>(cfg.weights.size()) != cfg.K)
            bad.emplace_back("weights must have K entries");
        for (double w : cfg.weights)
            if (!(w >= 0.0))
                bad.emplace_back("weights must be nonnegative");
    }
    if (!(cfg.power_w > 0.0) || !std::isfinite(cfg.power_w))
        bad.emplace_back("power must be positive");
    if (!cfg.noise.sigma2_w && !(cfg.noise.bandwidth_hz > 0.0))
        bad.emplace_back("bandwidth_hz must be positive");
    if (!(cfg.sigma2() > 0.0) || !std::isfinite(cfg.sigma2()))
        bad.emplace_back("noise power must be positive");
    if (cfg.phase_bits && (*cfg.phase_bits < 1 || *cfg.phase_bits > 16))
        bad.emplace_back("phase_bits must be in [1, 16]");
    if (cfg.kind == SystemKind::mimo) {
        if (cfg.rx_antennas < 1)
            bad.emplace_back("rx_antennas must be >= 1");
        if (cfg.streams < 0 || cfg.streams > std::min(cfg.M, cfg.rx_antennas))
            bad.emplace_back("streams must be in [0, min(M, rx_antennas)]");
        if (cfg.L() > 1)
            bad.emplace_back("MIMO systems support at most one RIS");
    }
    if (!cfg.geometry.ris_positions.empty() &&
        static_cast<int>(cfg.geometry.ris_positions.size()) != cfg.L())
        bad.emplace_back("ris_positions must have one entry per RIS");
    if (cfg.geometry.user_radius_m < 0.0)
        bad.emplace_back("user_radius_m must be nonnegative");
    if (cfg.power_model == PowerModel::general) {
        if (cfg.general_power.empty())
            bad.emplace_back("general power model needs at least one constraint");
        for (const auto &c : cfg.general_power) {
            if (c.omega.rows() != cfg.M || c.omega.cols() != cfg.M)
                bad.emplace_back("power constraint matrix must be M x M");
            if (!(c.power_w > 0.0))
                bad.emplace_back("power constraint budget must be positive");
        }
    }
    if (cfg.topology == TopologyKind::custom) {
        try {
            validate_topology(cfg.custom_topology, cfg.L());
            if (cfg.custom_topology.num_users() != cfg.K)
                bad.emplace_back("custom topology must list paths for every user");
        } catch (const std::invalid_argument &e) {
            bad.emplace_back(e.what());
        }
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto &b : bad)
            os << "\n  - " << b;
        throw std::invalid_argument(os.str());
    }
}

std::vector<PowerConstraint> power_constraints(const SystemConfig &cfg, int antennas, double budget) {
    std::vector<PowerConstraint> out;
    if (cfg.power_model == PowerModel::per_antenna) {
        for (int m = 0; m < antennas; ++m) {
            PowerConstraint c;
            c.omega = CMat::Zero(antennas, antennas);
            c.omega(m, m) = 1.0;
            c.power_w = budget / antennas;
            out.push_back(std::move(c));
        }
    } else if (cfg.power_model == PowerModel::general) {
        out = cfg.general_power;
    }
    return out;
}

std::vector<double> phase_alphabet(const SystemConfig &cfg) {
    std::vector<double> out;
    if (!cfg.phase_bits)
        return out;
    const int q = 1 << *cfg.phase_bits;
    for (int i = 0; i < q; ++i)
        out.push_back(2.0 * kPi * i / q);
    return out;
}

namespace {

double dist(const Vec3 &a, const Vec3 &b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                     (a[2] - b[2]) * (a[2] - b[2]));
}

Vec3 unit_dir(const Vec3 &from, const Vec3 &to) {
    const double d = dist(from, to);
    return {(to[0] - from[0]) / d, (to[1] - from[1]) / d, (to[2] - from[2]) / d};
}

// Linear arrays lie along the y axis.
CVec ula_toward(int n, double spacing, const Vec3 &from, const Vec3 &to) {
    return steering_ula(n, spacing, std::clamp(unit_dir(from, to)[1], -1.0, 1.0));
}

// Planar arrays lie in the x-z plane and face +y.
CVec upa_toward(int n, double spacing, const Vec3 &from, const Vec3 &to) {
    const Vec3 u = unit_dir(from, to);
    const double az = std::atan2(u[0], u[1]);
    const double el = std::asin(std::clamp(u[2], -1.0, 1.0));
    const auto [nx, ny] = upa_shape(n);
    return steering_upa(nx, ny, spacing, az, el).head(n);
}

std::vector<int> bs_order(const SystemConfig &cfg) {
    const auto pos = cfg.ris_positions();
    std::vector<int> idx(pos.size());
    std::iota(idx.begin(), idx.end(), 1);
    const Vec3 bs = cfg.geometry.bs_position;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return dist(bs, pos[a - 1]) < dist(bs, pos[b - 1]);
    });
    return idx;
}

std::vector<Vec3> draw_positions(int count, const Vec3 &center, double radius,
                                 const std::vector<Vec3> &avoid, Philox4x64 &rng) {
    std::vector<Vec3> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > 1000 * (count + 1))
            throw std::invalid_argument("generate_channels: cannot place users at >= 1 m from all nodes");
        const double r = radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * kPi * rng.uniform();
        const Vec3 p{center[0] + r * std::cos(phi), center[1] + r * std::sin(phi), center[2]};
        bool ok = true;
        for (const auto &a : avoid)
            ok = ok && dist(p, a) >= 1.0;
        if (ok)
            out.push_back(p);
    }
    return out;
}

} // namespace

ReflectionTopology cascade_topology(int K, const std::vector<int> &order) {
    ReflectionTopology t;
    t.paths.assign(K, {});
    if (!order.empty())
        for (auto &p : t.paths)
            p.push_back(order);
    return t;
}

ReflectionTopology no_reflection_topology(int K) {
    ReflectionTopology t;
    t.paths.assign(K, {});
    return t;
}

ReflectionTopology make_topology(const SystemConfig &cfg) {
    if (cfg.topology == TopologyKind::custom)
        return cfg.custom_topology;
    const std::vector<int> order = bs_order(cfg);
    if (cfg.topology == TopologyKind::cascade)
        return cascade_topology(cfg.K, order);
    // Every nonempty subset of RISs, visited in increasing distance from the BS.
    std::vector<std::vector<int>> all;
    const int L = cfg.L();
    for (int mask = 1; mask < (1 << L); ++mask) {
        std::vector<int> p;
        for (int r : order)
            if (mask & (1 << (r - 1)))
                p.push_back(r);
        all.push_back(p);
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto &a, const auto &b) { return a.size() < b.size(); });
    ReflectionTopology t;
    t.paths.assign(cfg.K, all);
    return t;
}

void validate_topology(const ReflectionTopology &topo, int L) {
    for (const auto &user : topo.paths)
        for (const auto &path : user) {
            if (path.empty())
                throw std::invalid_argument("topology: empty path");
            std::vector<int> seen;
            for (int r : path) {
                if (r < 1 || r > L)
                    throw std::invalid_argument("topology: RIS index out of range");
                if (std::find(seen.begin(), seen.end(), r) != seen.end())
                    throw std::invalid_argument("topology: RIS repeated within a path");
                seen.push_back(r);
            }
        }
}

double path_loss(double d, double rho) {
    if (d < 1.0)
        throw std::invalid_argument("path_loss: below reference distance");
    return 1e-3 * std::pow(d, -rho);
}

CVec steering_ula(int n, double spacing, double sin_theta) {
    if (n < 1)
        throw std::invalid_argument("steering_ula: n must be >= 1");
    if (std::abs(sin_theta) > 1.0 + 1e-12)
        throw std::invalid_argument("steering_ula: |sin theta| > 1");
    CVec a(n);
    for (int m = 0; m < n; ++m)
        a(m) = std::polar(1.0, 2.0 * kPi * spacing * m * sin_theta);
    return a;
}

CVec steering_upa(int nx, int ny, double spacing, double az, double el) {
    const CVec ax = steering_ula(nx, spacing, std::cos(el) * std::sin(az));
    const CVec ay = steering_ula(ny, spacing, std::sin(el));
    CVec a(nx * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            a(i * ny + j) = ax(i) * ay(j);
    return a;
}

std::pair<int, int> upa_shape(int N) {
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(N))));
    if (r * r == N)
        return {r, r};
    const int nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N))));
    return {nx, (N + nx - 1) / nx};
}

CMat rician_channel(int rows, int cols, double kappa, double k_factor, const CMat &los,
                    Philox4x64 &rng) {
    if (los.rows() != rows || los.cols() != cols)
        throw std::invalid_argument("rician_channel: LoS shape mismatch");
    if (kappa < 0.0 || k_factor < 0.0)
        throw std::invalid_argument("rician_channel: negative gain or factor");
    CMat nlos(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            nlos(r, c) = rng.cgauss();
    const double s = std::sqrt(kappa / (k_factor + 1.0));
    return s * (std::sqrt(k_factor) * los + nlos);
}

ChannelSetMiso generate_channels_miso(const SystemConfig &cfg, std::uint64_t seed) {
    validate(cfg);
    const auto &geo = cfg.geometry;
    const auto ris = cfg.ris_positions();
    const Vec3 bs = geo.bs_position;
    const int M = cfg.M, K = cfg.K, L = cfg.L();

    ChannelSetMiso ch;
    std::vector<Vec3> nodes{bs};
    nodes.insert(nodes.end(), ris.begin(), ris.end());
    Philox4x64 prng(seed, make_stream(StreamKind::positions));
    ch.user_positions = draw_positions(K, cfg.user_center(), geo.user_radius_m, nodes, prng);

    for (int i = 0; i < L; ++i) {
        const int N = cfg.ris_elements[i];
        const CMat los = upa_toward(N, geo.ris_spacing, ris[i], bs) *
                         ula_toward(M, geo.bs_spacing, bs, ris[i]).adjoint();
        Philox4x64 rng(seed, make_stream(StreamKind::bs_ris, i + 1));
        ch.G0.push_back(rician_channel(N, M, path_loss(dist(bs, ris[i]), cfg.bs_ris.exponent),
                                       cfg.bs_ris.rician_factor, los, rng));
    }
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            if (i == j)
                continue;
            const int Ni = cfg.ris_elements[i], Nj = cfg.ris_elements[j];
            const CMat los = upa_toward(Nj, geo.ris_spacing, ris[j], ris[i]) *
                             upa_toward(Ni, geo.ris_spacing, ris[i], ris[j]).adjoint();
            Philox4x64 rng(seed, make_stream(StreamKind::ris_ris, i + 1, j + 1));
            ch.G[{i + 1, j + 1}] =
                rician_channel(Nj, Ni, path_loss(dist(ris[i], ris[j]), cfg.bs_ris.exponent),
                               cfg.bs_ris.rician_factor, los, rng);
        }
    ch.hr.assign(K, {});
    for (int k = 0; k < K; ++k) {
        const Vec3 &u = ch.user_positions[k];
        for (int i = 0; i < L; ++i) {
            const int N = cfg.ris_elements[i];
            const CMat los = upa_toward(N, geo.ris_spacing, ris[i], u);
            Philox4x64 rng(seed, make_stream(StreamKind::ris_user, i + 1, k));
            ch.hr[k].push_back(rician_channel(N, 1, path_loss(dist(ris[i], u), cfg.ris_user.exponent),
                                              cfg.ris_user.rician_factor, los, rng));
        }
        const CMat los = ula_toward(M, geo.bs_spacing, bs, u);
        Philox4x64 rng(seed, make_stream(StreamKind::direct, k));
        ch.hd.push_back(rician_channel(M, 1, path_loss(dist(bs, u), cfg.direct.exponent),
                                       cfg.direct.rician_factor, los, rng));
    }
    return ch;
}

ChannelSetMimo generate_channels_mimo(const SystemConfig &cfg, std::uint64_t seed) {
    validate(cfg);
    if (cfg.L() != 1)
        throw std::invalid_argument("generate_channels_mimo: exactly one RIS required");
    const auto &geo = cfg.geometry;
    const Vec3 ris = cfg.ris_positions()[0];
    const int Mt = cfg.M, Mr = cfg.rx_antennas, K = cfg.K, N = cfg.ris_elements[0];

    ChannelSetMimo ch;
    Philox4x64 ptx(seed, make_stream(StreamKind::positions, 0));
    Philox4x64 prx(seed, make_stream(StreamKind::positions, 1));
    ch.tx_positions = draw_positions(K, cfg.tx_center(), geo.user_radius_m, {ris}, ptx);
    ch.rx_positions = draw_positions(K, cfg.user_center(), geo.user_radius_m, {ris}, prx);

    for (int j = 0; j < K; ++j) {
        const Vec3 &t = ch.tx_positions[j];
        const CMat los = upa_toward(N, geo.ris_spacing, ris, t) *
                         ula_toward(Mt, geo.user_spacing, t, ris).adjoint();
        Philox4x64 rng(seed, make_stream(StreamKind::tx_ris, j));
        ch.Gt.push_back(rician_channel(N, Mt, path_loss(dist(t, ris), cfg.bs_ris.exponent),
                                       cfg.bs_ris.rician_factor, los, rng));
    }
    ch.Hd.assign(K, {});
    for (int k = 0; k < K; ++k) {
        const Vec3 &r = ch.rx_positions[k];
        const CMat los = ula_toward(Mr, geo.user_spacing, r, ris) *
                         upa_toward(N, geo.ris_spacing, ris, r).adjoint();
        Philox4x64 rng(seed, make_stream(StreamKind::ris_rx, k));
        ch.Hr.push_back(rician_channel(Mr, N, path_loss(dist(ris, r), cfg.ris_user.exponent),
                                       cfg.ris_user.rician_factor, los, rng));
        for (int j = 0; j < K; ++j) {
            const Vec3 &t = ch.tx_positions[j];
            const double d = dist(t, r);
            const CMat dlos = ula_toward(Mr, geo.user_spacing, r, t) *
                              ula_toward(Mt, geo.user_spacing, t, r).adjoint();
            Philox4x64 drng(seed, make_stream(StreamKind::tx_rx, k, j));
            ch.Hd[k].push_back(rician_channel(Mr, Mt, path_loss(d, cfg.direct.exponent),
                                              cfg.direct.rician_factor, dlos, drng));
        }
    }
    return ch;
}

namespace {

const CMat &ris_link(const ChannelSetMiso &ch, int from, int to) {
    auto it = ch.G.find({from, to});
    if (it == ch.G.end())
        throw std::invalid_argument("topology references a missing RIS-to-RIS channel");
    return it->second;
}

// Vector that multiplies diag(theta_{p[i]}) from the right within a path,
// i.e. G^T_{p_i,p_{i+1}} Theta ... h^r (length N_{p[i]}).
CVec path_suffix(const std::vector<int> &p, std::size_t i, int k, const Design &d,
                 const ChannelSetMiso &ch) {
    const std::size_t n = p.size();
    CVec v = ch.hr[k][p[n - 1] - 1];
    for (std::size_t m = n - 1; m > i; --m) {
        v = d.theta[p[m] - 1].cwiseProduct(v);
        v = ris_link(ch, p[m - 1], p[m]).transpose() * v;
    }
    return v;
}

} // namespace

CVec effective_channel_miso(int k, const Design &design, const ChannelSetMiso &ch,
                            const ReflectionTopology &topo) {
    CVec h = topo.direct ? CVec(ch.hd[k]) : CVec(CVec::Zero(ch.M()));
    for (const auto &p : topo.paths.at(k)) {
        const CVec s = path_suffix(p, 0, k, design, ch);
        h += ch.G0[p[0] - 1].transpose() * design.theta[p[0] - 1].cwiseProduct(s);
    }
    return h;
}

CMat effective_channels(const Design &design, const ChannelSetMiso &ch,
                        const ReflectionTopology &topo) {
    CMat H(ch.M(), ch.K());
    for (int k = 0; k < ch.K(); ++k)
        H.col(k) = effective_channel_miso(k, design, ch, topo);
    return H;
}

bool user_uses_ris(int k, int l, const ReflectionTopology &topo) {
    for (const auto &p : topo.paths.at(k))
        if (std::find(p.begin(), p.end(), l) != p.end())
            return true;
    return false;
}

AffineChannel reflect_channel_matrix(int k, int l, const Design &design, const ChannelSetMiso &ch,
                                     const ReflectionTopology &topo) {
    if (!user_uses_ris(k, l, topo))
        throw std::invalid_argument("reflect_channel_matrix: RIS not on any path of this user");
    const int M = ch.M();
    const int Nl = static_cast<int>(ch.G0[l - 1].rows());
    AffineChannel out{CMat::Zero(M, Nl), topo.direct ? CVec(ch.hd[k]) : CVec(CVec::Zero(M))};
    for (const auto &p : topo.paths[k]) {
        const auto it = std::find(p.begin(), p.end(), l);
        if (it == p.end()) {
            const CVec s = path_suffix(p, 0, k, design, ch);
            out.rest += ch.G0[p[0] - 1].transpose() * design.theta[p[0] - 1].cwiseProduct(s);
            continue;
        }
        const std::size_t i = static_cast<std::size_t>(it - p.begin());
        CMat P = ch.G0[p[0] - 1].transpose();
        for (std::size_t m = 0; m < i; ++m)
            P = P * design.theta[p[m] - 1].asDiagonal() * ris_link(ch, p[m], p[m + 1]).transpose();
        const CVec s = path_suffix(p, i, k, design, ch);
        out.F += P * s.asDiagonal();
    }
    return out;
}

CMat mimo_link(int k, int j, const CVec &theta, const ChannelSetMimo &ch) {
    return ch.Hr[k] * theta.asDiagonal() * ch.Gt[j] + ch.Hd[k][j];
}

} // namespace rissim
