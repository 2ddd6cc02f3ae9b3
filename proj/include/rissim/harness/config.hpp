// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "rissim/channel.hpp"

namespace rissim {

// full: N = 100 elements per RIS and 100 trials; desk: N = 16 and 20 trials.
// The profile only fills fields the file leaves out.
enum class Profile { full, desk };

int default_trials(Profile p);

// JSON schema (all fields optional, units in the names):
//   system: "miso" | "mimo"
//   bs_antennas, users, rx_antennas, streams: integers
//   ris_elements: integer or list of integers (one per RIS)
//   weights: list of K nonnegative reals
//   power_dbm | power_w: total (MISO) or per-transmitter (MIMO) budget
//   power_model: "total" | "per_antenna" | "general"
//   general_power: [{omega_re: [[..]], omega_im: [[..]], power_w | power_dbm}]
//   noise: {sigma2_w} | {psd_dbm_per_hz, bandwidth_hz}
//   geometry: {distance_m, bs_position_m, ris_positions_m, user_center_m,
//              user_radius_m, tx_center_m, bs_spacing_wavelengths,
//              ris_spacing_wavelengths, user_spacing_wavelengths}
//   links: {bs_ris | direct | ris_user: {exponent, rician_factor}}
//   phase_bits: integer or null
//   topology: "cascade" | "paths" | "custom"
//   custom_topology: {direct: bool, paths: [[[ris, ...], ...] per user]}
// Unknown or ill-typed fields raise std::invalid_argument naming every one.
SystemConfig config_from_json(const nlohmann::json &j, Profile profile = Profile::full);
nlohmann::json config_to_json(const SystemConfig &cfg);

SystemConfig load_config(const std::string &path, Profile profile = Profile::full);
void save_config(const SystemConfig &cfg, const std::string &path);

double dbm_to_watts(double dbm);

} // namespace rissim
