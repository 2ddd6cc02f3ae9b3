// SPDX-License-Identifier: Apache-2.0
#include "rissim/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rissim {

using nlohmann::json;

int default_trials(Profile p) { return p == Profile::desk ? 20 : 100; }

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

namespace {

class Reader {
public:
    std::vector<std::string> errors;

    void allow(const json &obj, const std::string &where, const std::set<std::string> &keys) {
        if (!obj.is_object()) {
            errors.push_back(where + ": expected an object");
            return;
        }
        for (const auto &[k, v] : obj.items())
            if (!keys.count(k))
                errors.push_back(where + k + ": unknown field");
    }

    template <class T>
    void get(const json &obj, const std::string &key, const std::string &where, T &out) {
        if (!obj.is_object() || !obj.contains(key))
            return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception &) {
            errors.push_back(where + key + ": wrong type");
        }
    }

    void vec3(const json &obj, const std::string &key, const std::string &where, Vec3 &out) {
        std::vector<double> v;
        get(obj, key, where, v);
        if (obj.contains(key)) {
            if (v.size() == 3)
                out = {v[0], v[1], v[2]};
            else
                errors.push_back(where + key + ": expected three coordinates");
        }
    }

    void link(const json &obj, const std::string &key, LinkParams &out) {
        if (!obj.contains(key))
            return;
        const json &l = obj.at(key);
        allow(l, "links." + key + ".", {"exponent", "rician_factor"});
        get(l, "exponent", "links." + key + ".", out.exponent);
        get(l, "rician_factor", "links." + key + ".", out.rician_factor);
        if (!(out.rician_factor >= 0.0))
            errors.push_back("links." + key + ".rician_factor: must be nonnegative");
    }
};

CMat matrix_from(const json &re, const json *im, Reader &rd, const std::string &where) {
    std::vector<std::vector<double>> r, i;
    try {
        r = re.get<std::vector<std::vector<double>>>();
        if (im)
            i = im->get<std::vector<std::vector<double>>>();
    } catch (const json::exception &) {
        rd.errors.push_back(where + ": matrix must be a list of rows");
        return {};
    }
    const std::size_t n = r.size();
    CMat m(static_cast<Eigen::Index>(n), n ? static_cast<Eigen::Index>(r[0].size()) : 0);
    for (std::size_t a = 0; a < n; ++a) {
        if (r[a].size() != static_cast<std::size_t>(m.cols()) || (im && (i.size() != n || i[a].size() != r[a].size()))) {
            rd.errors.push_back(where + ": ragged matrix");
            return {};
        }
        for (std::size_t b = 0; b < r[a].size(); ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cd(r[a][b], im ? i[a][b] : 0.0);
    }
    return m;
}

} // namespace

SystemConfig config_from_json(const json &j, Profile profile) {
    SystemConfig cfg;
    Reader rd;
    rd.allow(j, "",
             {"system", "bs_antennas", "users", "ris_elements", "rx_antennas", "streams", "weights", "power_dbm",
              "power_w", "power_model", "general_power", "noise", "geometry", "links", "phase_bits", "topology",
              "custom_topology"});
    if (!j.is_object())
        throw std::invalid_argument("config: top level must be a JSON object");

    std::string s;
    if (j.contains("system")) {
        rd.get(j, "system", "", s);
        if (s == "miso")
            cfg.kind = SystemKind::miso;
        else if (s == "mimo")
            cfg.kind = SystemKind::mimo;
        else
            rd.errors.push_back("system: expected \"miso\" or \"mimo\"");
    }
    rd.get(j, "bs_antennas", "", cfg.M);
    rd.get(j, "users", "", cfg.K);
    rd.get(j, "rx_antennas", "", cfg.rx_antennas);
    rd.get(j, "streams", "", cfg.streams);
    if (j.contains("ris_elements")) {
        if (j["ris_elements"].is_number_integer())
            cfg.ris_elements = {j["ris_elements"].get<int>()};
        else
            rd.get(j, "ris_elements", "", cfg.ris_elements);
    } else if (profile == Profile::desk) {
        cfg.ris_elements = {16};
    }
    rd.get(j, "weights", "", cfg.weights);
    if (j.contains("power_dbm") && j.contains("power_w"))
        rd.errors.push_back("power_dbm/power_w: give only one");
    if (j.contains("power_dbm")) {
        double dbm = 0.0;
        rd.get(j, "power_dbm", "", dbm);
        cfg.power_w = dbm_to_watts(dbm);
    }
    rd.get(j, "power_w", "", cfg.power_w);
    if (j.contains("power_model")) {
        rd.get(j, "power_model", "", s);
        if (s == "total")
            cfg.power_model = PowerModel::total;
        else if (s == "per_antenna")
            cfg.power_model = PowerModel::per_antenna;
        else if (s == "general")
            cfg.power_model = PowerModel::general;
        else
            rd.errors.push_back("power_model: expected total, per_antenna or general");
    }
    if (j.contains("general_power")) {
        if (!j["general_power"].is_array())
            rd.errors.push_back("general_power: expected a list");
        else
            for (std::size_t i = 0; i < j["general_power"].size(); ++i) {
                const json &c = j["general_power"][i];
                const std::string w = "general_power[" + std::to_string(i) + "].";
                rd.allow(c, w, {"omega_re", "omega_im", "power_w", "power_dbm"});
                PowerConstraint pc;
                if (!c.is_object() || !c.contains("omega_re")) {
                    rd.errors.push_back(w + "omega_re: required");
                    continue;
                }
                pc.omega = matrix_from(c["omega_re"], c.contains("omega_im") ? &c["omega_im"] : nullptr, rd,
                                       w + "omega");
                if (c.contains("power_dbm")) {
                    double dbm = 0.0;
                    rd.get(c, "power_dbm", w, dbm);
                    pc.power_w = dbm_to_watts(dbm);
                }
                rd.get(c, "power_w", w, pc.power_w);
                cfg.general_power.push_back(pc);
            }
    }
    if (j.contains("noise")) {
        const json &n = j["noise"];
        rd.allow(n, "noise.", {"sigma2_w", "psd_dbm_per_hz", "bandwidth_hz"});
        if (n.is_object()) {
            const bool direct = n.contains("sigma2_w");
            const bool psd = n.contains("psd_dbm_per_hz") || n.contains("bandwidth_hz");
            if (direct && psd)
                rd.errors.push_back("noise: give either sigma2_w or psd_dbm_per_hz/bandwidth_hz, not both");
            if (direct) {
                double v = 0.0;
                rd.get(n, "sigma2_w", "noise.", v);
                cfg.noise.sigma2_w = v;
            }
            rd.get(n, "psd_dbm_per_hz", "noise.", cfg.noise.psd_dbm_per_hz);
            rd.get(n, "bandwidth_hz", "noise.", cfg.noise.bandwidth_hz);
        }
    }
    if (j.contains("geometry")) {
        const json &g = j["geometry"];
        const std::string w = "geometry.";
        rd.allow(g, w,
                 {"distance_m", "bs_position_m", "ris_positions_m", "user_center_m", "user_radius_m", "tx_center_m",
                  "bs_spacing_wavelengths", "ris_spacing_wavelengths", "user_spacing_wavelengths"});
        Geometry &geo = cfg.geometry;
        rd.get(g, "distance_m", w, geo.distance_m);
        rd.vec3(g, "bs_position_m", w, geo.bs_position);
        if (g.is_object() && g.contains("ris_positions_m")) {
            std::vector<std::vector<double>> p;
            rd.get(g, "ris_positions_m", w, p);
            for (const auto &v : p) {
                if (v.size() != 3) {
                    rd.errors.push_back(w + "ris_positions_m: expected three coordinates per RIS");
                    break;
                }
                geo.ris_positions.push_back({v[0], v[1], v[2]});
            }
        }
        if (g.is_object() && g.contains("user_center_m")) {
            Vec3 c{};
            rd.vec3(g, "user_center_m", w, c);
            geo.user_center = c;
        }
        if (g.is_object() && g.contains("tx_center_m")) {
            Vec3 c{};
            rd.vec3(g, "tx_center_m", w, c);
            geo.tx_center = c;
        }
        rd.get(g, "user_radius_m", w, geo.user_radius_m);
        rd.get(g, "bs_spacing_wavelengths", w, geo.bs_spacing);
        rd.get(g, "ris_spacing_wavelengths", w, geo.ris_spacing);
        rd.get(g, "user_spacing_wavelengths", w, geo.user_spacing);
    }
    if (j.contains("links")) {
        const json &l = j["links"];
        rd.allow(l, "links.", {"bs_ris", "direct", "ris_user"});
        if (l.is_object()) {
            rd.link(l, "bs_ris", cfg.bs_ris);
            rd.link(l, "direct", cfg.direct);
            rd.link(l, "ris_user", cfg.ris_user);
        }
    }
    if (j.contains("phase_bits") && !j["phase_bits"].is_null()) {
        int b = 0;
        rd.get(j, "phase_bits", "", b);
        cfg.phase_bits = b;
    }
    if (j.contains("topology")) {
        rd.get(j, "topology", "", s);
        if (s == "cascade")
            cfg.topology = TopologyKind::cascade;
        else if (s == "paths")
            cfg.topology = TopologyKind::paths;
        else if (s == "custom")
            cfg.topology = TopologyKind::custom;
        else
            rd.errors.push_back("topology: expected cascade, paths or custom");
    }
    if (j.contains("custom_topology")) {
        const json &t = j["custom_topology"];
        rd.allow(t, "custom_topology.", {"direct", "paths"});
        rd.get(t, "direct", "custom_topology.", cfg.custom_topology.direct);
        rd.get(t, "paths", "custom_topology.", cfg.custom_topology.paths);
    }

    if (!rd.errors.empty()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto &e : rd.errors)
            os << "\n  - " << e;
        throw std::invalid_argument(os.str());
    }
    validate(cfg);
    return cfg;
}

json config_to_json(const SystemConfig &cfg) {
    json j;
    j["system"] = cfg.kind == SystemKind::mimo ? "mimo" : "miso";
    j["bs_antennas"] = cfg.M;
    j["users"] = cfg.K;
    j["ris_elements"] = cfg.ris_elements;
    j["rx_antennas"] = cfg.rx_antennas;
    j["streams"] = cfg.streams;
    j["weights"] = cfg.weights;
    j["power_w"] = cfg.power_w;
    j["power_model"] = cfg.power_model == PowerModel::total         ? "total"
                       : cfg.power_model == PowerModel::per_antenna ? "per_antenna"
                                                                    : "general";
    json gp = json::array();
    for (const auto &c : cfg.general_power) {
        std::vector<std::vector<double>> re(c.omega.rows()), im(c.omega.rows());
        for (Eigen::Index a = 0; a < c.omega.rows(); ++a)
            for (Eigen::Index b = 0; b < c.omega.cols(); ++b) {
                re[a].push_back(c.omega(a, b).real());
                im[a].push_back(c.omega(a, b).imag());
            }
        gp.push_back({{"omega_re", re}, {"omega_im", im}, {"power_w", c.power_w}});
    }
    j["general_power"] = gp;
    if (cfg.noise.sigma2_w)
        j["noise"] = {{"sigma2_w", *cfg.noise.sigma2_w}};
    else
        j["noise"] = {{"psd_dbm_per_hz", cfg.noise.psd_dbm_per_hz}, {"bandwidth_hz", cfg.noise.bandwidth_hz}};
    const Geometry &g = cfg.geometry;
    json geo;
    geo["distance_m"] = g.distance_m;
    geo["bs_position_m"] = g.bs_position;
    geo["ris_positions_m"] = g.ris_positions;
    if (g.user_center)
        geo["user_center_m"] = *g.user_center;
    if (g.tx_center)
        geo["tx_center_m"] = *g.tx_center;
    geo["user_radius_m"] = g.user_radius_m;
    geo["bs_spacing_wavelengths"] = g.bs_spacing;
    geo["ris_spacing_wavelengths"] = g.ris_spacing;
    geo["user_spacing_wavelengths"] = g.user_spacing;
    j["geometry"] = geo;
    auto link = [](const LinkParams &p) { return json{{"exponent", p.exponent}, {"rician_factor", p.rician_factor}}; };
    j["links"] = {{"bs_ris", link(cfg.bs_ris)}, {"direct", link(cfg.direct)}, {"ris_user", link(cfg.ris_user)}};
    j["phase_bits"] = cfg.phase_bits ? json(*cfg.phase_bits) : json(nullptr);
    j["topology"] = cfg.topology == TopologyKind::cascade ? "cascade"
                    : cfg.topology == TopologyKind::paths ? "paths"
                                                          : "custom";
    if (cfg.topology == TopologyKind::custom)
        j["custom_topology"] = {{"direct", cfg.custom_topology.direct}, {"paths", cfg.custom_topology.paths}};
    return j;
}

SystemConfig load_config(const std::string &path, Profile profile) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    return config_from_json(j, profile);
}

void save_config(const SystemConfig &cfg, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write config " + path);
    out << config_to_json(cfg).dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

} // namespace rissim
