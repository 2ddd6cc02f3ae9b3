// SPDX-License-Identifier: Apache-2.0
#include "rissim/harness/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rissim {

namespace {

std::string num(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

} // namespace

std::string csv_text(const std::vector<TrialSummary> &trials) {
    std::string s = "trial,iter,objective_nats,time_ms\n";
    for (const auto &t : trials)
        for (std::size_t i = 0; i < t.log.iters.size(); ++i) {
            const auto &r = t.log.iters[i];
            s += std::to_string(t.trial) + ',' + std::to_string(i) + ',' + num(r.objective, 17) + ',' +
                 num(r.time_ms, 17) + '\n';
        }
    return s;
}

std::vector<CsvRow> parse_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "trial,iter,objective_nats,time_ms")
        throw std::invalid_argument("parse_csv: unexpected header");
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        CsvRow r;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &r.trial, &r.iter, &r.objective_nats, &r.time_ms) != 4)
            throw std::invalid_argument("parse_csv: bad row: " + line);
        rows.push_back(r);
    }
    return rows;
}

std::string svg_text(const std::vector<TrialSummary> &trials) {
    const double W = 640, H = 400, pad = 50;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t n = 1;
    for (const auto &t : trials) {
        n = std::max(n, t.log.iters.size());
        for (const auto &r : t.log.iters) {
            lo = std::min(lo, r.objective);
            hi = std::max(hi, r.objective);
        }
    }
    if (!(lo < hi)) {
        lo = std::isfinite(lo) ? lo - 1.0 : 0.0;
        hi = lo + 2.0;
    }
    auto x = [&](std::size_t i) { return pad + (W - 2 * pad) * (n > 1 ? double(i) / double(n - 1) : 0.0); };
    auto y = [&](double v) { return H - pad - (H - 2 * pad) * (v - lo) / (hi - lo); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">outer iteration</text>\n";
    os << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
       << ")\" text-anchor=\"middle\">objective (nats/s/Hz)</text>\n";
    os << "<text x=\"" << pad - 5 << "\" y=\"" << pad << "\" text-anchor=\"end\">" << num(hi, 4) << "</text>\n";
    os << "<text x=\"" << pad - 5 << "\" y=\"" << H - pad << "\" text-anchor=\"end\">" << num(lo, 4) << "</text>\n";
    static const char *colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    for (std::size_t t = 0; t < trials.size(); ++t) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[t % 6] << "\" points=\"";
        const auto &it = trials[t].log.iters;
        for (std::size_t i = 0; i < it.size(); ++i)
            os << (i ? " " : "") << num(x(i), 6) << ',' << num(y(it[i].objective), 6);
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

} // namespace rissim
