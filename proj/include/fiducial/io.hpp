#pragma once

// CSV ingestion and the run output files (samples, report, histograms, traces).
// Every double is written with 17 significant digits.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiducial/compat.hpp"
#include "fiducial/dataset.hpp"
#include "fiducial/diagnostics.hpp"
#include "fiducial/errors.hpp"
#include "fiducial/sample_matrix.hpp"

namespace fiducial::io {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
  std::size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) throw DomainError(where + ": empty value");
  const std::string t = s.substr(a, b - a + 1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) throw DomainError(where + ": '" + t + "' is not a number");
  return v;
}

/// Headered CSV held as strings; `#` lines and blank lines are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string source;

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }

  std::vector<double> numeric(const std::string& name) const {
    const auto col = find(name);
    if (!col) throw DomainError(source + ": missing column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.push_back(parse_double(rows[r][*col], source + " line " + std::to_string(r + 2)));
    }
    return out;
  }
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    std::size_t a = cell.find_first_not_of(" \t\r\""), b = cell.find_last_not_of(" \t\r\"");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  Table t;
  t.source = path;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DomainError(path + ": row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                        " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw DomainError(path + ": no header line");
  return t;
}

/// Univariate: column x. Paired: columns x, y. Two-sample: column x of each
/// file, or a single file with columns x and group holding exactly two labels
/// (first label seen is the x sample).
inline Dataset load_dataset(Layout layout, const std::string& path, const std::string& path_y = "") {
  const Table t = read_csv(path);
  switch (layout) {
    case Layout::univariate: return Dataset::univariate(t.numeric("x"));
    case Layout::paired: return Dataset::paired(t.numeric("x"), t.numeric("y"));
    case Layout::two_sample: {
      if (!path_y.empty()) return Dataset::two_sample(t.numeric("x"), read_csv(path_y).numeric("x"));
      const auto g = t.find("group");
      if (!g) throw DomainError(path + ": two-sample data need a 'group' column or a second file");
      const std::vector<double> x = t.numeric("x");
      std::vector<std::string> labels;
      std::vector<double> a, b;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& lab = t.rows[r][*g];
        if (std::find(labels.begin(), labels.end(), lab) == labels.end()) labels.push_back(lab);
        if (labels.size() > 2) throw DomainError(path + ": group column has more than two labels");
        (lab == labels.front() ? a : b).push_back(x[r]);
      }
      if (labels.size() != 2) throw DomainError(path + ": group column needs exactly two labels");
      return Dataset::two_sample(std::move(a), std::move(b));
    }
  }
  throw DomainError("unknown layout");
}

inline void write_dataset(std::ostream& out, const Dataset& d) {
  switch (d.layout()) {
    case Layout::univariate:
      out << "x\n";
      for (double v : d.x()) out << fmt(v) << '\n';
      break;
    case Layout::paired:
      out << "x,y\n";
      for (std::size_t i = 0; i < d.x().size(); ++i) out << fmt(d.x()[i]) << ',' << fmt(d.y()[i]) << '\n';
      break;
    case Layout::two_sample:
      out << "x,group\n";
      for (double v : d.x()) out << fmt(v) << ",x\n";
      for (double v : d.y()) out << fmt(v) << ",y\n";
      break;
  }
}

inline void write_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  write_dataset(out, d);
}

/// Every cycle of every chain, burn-in included.
inline void write_samples(const std::string& path, const SampleMatrix& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << "chain,cycle";
  for (const auto& l : s.labels()) out << ',' << l;
  out << '\n';
  for (std::size_t c = 0; c < s.chains(); ++c) {
    for (std::size_t i = 0; i < s.m(); ++i) {
      out << c << ',' << i;
      for (double v : s.row(c, i)) out << ',' << fmt(v);
      out << '\n';
    }
  }
}

/// Inverse of write_samples. Chains must be complete and numbered 0..C-1.
inline SampleMatrix read_samples(const std::string& path, std::size_t b) {
  const Table t = read_csv(path);
  if (t.header.size() < 3 || t.header[0] != "chain" || t.header[1] != "cycle") {
    throw DomainError(path + ": expected header 'chain,cycle,<params...>'");
  }
  const std::vector<double> chain = t.numeric("chain"), cycle = t.numeric("cycle");
  std::size_t chains = 0, m = 0;
  for (std::size_t r = 0; r < chain.size(); ++r) {
    chains = std::max(chains, static_cast<std::size_t>(chain[r]) + 1);
    m = std::max(m, static_cast<std::size_t>(cycle[r]) + 1);
  }
  if (chains * m != t.rows.size()) throw DomainError(path + ": chains are incomplete or ragged");
  ChainConfig cfg;
  cfg.chains = chains;
  cfg.m = m;
  cfg.b = b;
  if (b >= m) throw DomainError("burn-in b must be smaller than the number of cycles");
  std::vector<std::string> labels(t.header.begin() + 2, t.header.end());
  cfg.scan_order = labels;
  SampleMatrix s(labels, cfg);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const std::vector<double> col = t.numeric(labels[j]);
    for (std::size_t r = 0; r < col.size(); ++r) {
      s.at(static_cast<std::size_t>(chain[r]), static_cast<std::size_t>(cycle[r]), j) = col[r];
    }
  }
  return s;
}

inline void write_histogram(const std::string& path, const Histogram& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << "bin_left,bin_right,count,density\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << fmt(h.edges[i]) << ',' << fmt(h.edges[i + 1]) << ',' << h.counts[i] << ',' << fmt(h.density(i)) << '\n';
  }
}

/// Chain 0, every cycle.
inline void write_trace(const std::string& path, const SampleMatrix& s, std::size_t j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << "cycle,value\n";
  for (std::size_t i = 0; i < s.m(); ++i) out << i << ',' << fmt(s.at(0, i, j)) << '\n';
}

inline nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::ordered_json to_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j;
  j["chains"] = r.chains;
  j["m"] = r.m;
  j["b"] = r.b;
  j["seed"] = r.seed;
  j["scan_order"] = r.scan_order;
  j["truncation_warnings"] = r.warnings;
  j["thresholds"] = {{"max_rhat", r.thresholds.max_rhat}, {"min_ess", r.thresholds.min_ess}};
  j["converged"] = r.converged;
  auto& ps = j["parameters"] = nlohmann::ordered_json::array();
  for (const auto& p : r.params) {
    nlohmann::ordered_json e;
    e["label"] = p.label;
    e["split_rhat"] = num(p.rhat);
    e["rhat_degenerate"] = p.rhat_degenerate;
    e["ess"] = num(p.ess);
    e["mean"] = p.mean;
    e["sd"] = p.sd;
    e["quantiles"] = {{"q025", p.q025}, {"q50", p.q50}, {"q975", p.q975}};
    e["narrowed_draws"] = p.narrowed_draws;
    e["converged"] = p.converged;
    e["histogram"] = {{"edges", p.hist.edges}, {"counts", p.hist.counts}};
    ps.push_back(std::move(e));
  }
  return j;
}

inline nlohmann::ordered_json to_json(const CompatReport& r) {
  nlohmann::ordered_json j;
  j["param"] = r.param;
  j["verdict"] = to_string(r.verdict);
  j["log_ratio_spread"] = num(r.log_ratio_spread);
  j["tolerance"] = r.tol;
  j["approximate"] = r.approximate;
  j["note"] = r.note;
  auto& sl = j["slices"] = nlohmann::ordered_json::array();
  for (const auto& s : r.slices) {
    sl.push_back({{"fixed", s.fixed}, {"spread", num(s.spread)}, {"grid", s.grid}});
  }
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

}  // namespace fiducial::io
