// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rissim/harness/monte_carlo.hpp"

namespace rissim {

struct CsvRow {
    int trial = 0;
    int iter = 0;
    double objective_nats = 0.0;
    double time_ms = 0.0;
};

// Header `trial,iter,objective_nats,time_ms`, one row per logged iteration
// (iteration 0 is the initial point). Numbers use 17 significant digits.
std::string csv_text(const std::vector<TrialSummary> &trials);
std::vector<CsvRow> parse_csv(const std::string &text);

// Line chart of objective versus iteration, one polyline per trial.
std::string svg_text(const std::vector<TrialSummary> &trials);

// Throws std::runtime_error naming the path on IO failure.
void write_text(const std::string &path, const std::string &text);

} // namespace rissim
