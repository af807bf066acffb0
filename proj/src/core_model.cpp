#include "pcd/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "pcd/parallel.hpp"

namespace pcd {

int default_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PCDISPATCH_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

bool LoadBox::degenerate() const {
  for (std::size_t t = 0; t < nominal.size(); ++t)
    if (d_min[t] != d_max[t]) return false;
  return true;
}

namespace {

void append_num(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g;", v);
  s += buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t CaseDefinition::hash() const {
  std::string s;
  for (const auto& g : generators) {
    s += g.id;
    s += '|';
    for (double v : {g.p_min, g.p_max, g.ramp_up, g.ramp_down, g.startup_ramp,
                     g.shutdown_ramp, g.cost_a, g.cost_b, g.cost_c,
                     g.startup_cost, g.shutdown_cost, g.initial_power})
      append_num(s, v);
    s += std::to_string(g.min_up) + ',' + std::to_string(g.min_down) + ',' +
         (g.initial_on ? '1' : '0') + ',' + std::to_string(g.initial_state_duration) + '#';
  }
  for (int t = 0; t < loads.periods(); ++t) {
    append_num(s, loads.nominal[t]);
    append_num(s, loads.d_min[t]);
    append_num(s, loads.d_max[t]);
  }
  append_num(s, shed_penalty);
  s += std::to_string(n_segments);
  return fnv1a(s);
}

void validate_case(const CaseDefinition& c) {
  if (c.generators.empty()) throw ValidationError("case has no generators");
  if (c.loads.periods() == 0) throw ValidationError("case has no load periods");
  if (c.n_segments < 1) throw ValidationError("n_segments must be >= 1");

  const std::size_t T = c.loads.nominal.size();
  if (c.loads.d_min.size() != T || c.loads.d_max.size() != T)
    throw ValidationError("load vectors nominal/d_min/d_max must have equal length");
  for (std::size_t t = 0; t < T; ++t) {
    if (!(c.loads.d_min[t] >= 0.0))
      throw ValidationError("d_min must be >= 0 in period " + std::to_string(t + 1));
    if (c.loads.d_min[t] > c.loads.d_max[t])
      throw ValidationError("d_min > d_max in period " + std::to_string(t + 1));
    if (c.loads.nominal[t] < c.loads.d_min[t] || c.loads.nominal[t] > c.loads.d_max[t])
      throw ValidationError("nominal load outside [d_min, d_max] in period " +
                            std::to_string(t + 1));
  }

  double max_marginal = 0.0;
  for (const auto& g : c.generators) {
    const std::string who = "generator '" + g.id + "'";
    if (!(g.p_min >= 0.0)) throw ValidationError(who + ": p_min must be >= 0");
    if (g.p_min > g.p_max) throw ValidationError(who + ": p_min > p_max");
    if (g.ramp_up < 0.0 || g.ramp_down < 0.0 || g.startup_ramp < 0.0 || g.shutdown_ramp < 0.0)
      throw ValidationError(who + ": ramp rates must be >= 0");
    if (g.cost_c < 0.0) throw ValidationError(who + ": cost_c must be >= 0");
    if (g.min_up < 1) throw ValidationError(who + ": min_up must be >= 1");
    if (g.min_down < 1) throw ValidationError(who + ": min_down must be >= 1");
    if (g.initial_state_duration < 0)
      throw ValidationError(who + ": initial_state_duration must be >= 0");
    if (g.initial_on && (g.initial_power < g.p_min || g.initial_power > g.p_max))
      throw ValidationError(who + ": initial_power outside [p_min, p_max] while initially on");
    max_marginal = std::max(max_marginal, g.max_marginal_cost());
  }
  if (!(c.shed_penalty > max_marginal))
    throw ValidationError("shed_penalty must exceed the maximum marginal cost (" +
                          std::to_string(max_marginal) + ")");
}

namespace {

double get_num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double get_num_or(const nlohmann::json& j, const char* key, double fallback) {
  return j.contains(key) ? get_num(j, key) : fallback;
}

std::vector<double> get_vec(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw ParseError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

LoadBox loads_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load CSV not found: " + path);
  LoadBox box;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, nom, lo, hi;
    if (!(row >> t >> nom >> lo >> hi)) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw ParseError("bad row in load CSV: " + line);
    }
    first = false;
    box.nominal.push_back(nom);
    box.d_min.push_back(lo);
    box.d_max.push_back(hi);
  }
  return box;
}

}  // namespace

CaseDefinition case_from_json(const nlohmann::json& j, const std::string& base_dir) {
  CaseDefinition c;
  if (!j.contains("generators") || !j.at("generators").is_array())
    throw ParseError("case must contain a 'generators' array");
  for (const auto& gj : j.at("generators")) {
    GeneratorUnit g;
    g.id = gj.value("id", "g" + std::to_string(c.generators.size() + 1));
    g.p_min = get_num(gj, "p_min");
    g.p_max = get_num(gj, "p_max");
    g.ramp_up = get_num_or(gj, "ramp_up", g.p_max);
    g.ramp_down = get_num_or(gj, "ramp_down", g.p_max);
    g.startup_ramp = get_num_or(gj, "startup_ramp", g.p_max);
    g.shutdown_ramp = get_num_or(gj, "shutdown_ramp", g.p_max);
    g.cost_a = get_num_or(gj, "cost_a", 0.0);
    g.cost_b = get_num_or(gj, "cost_b", 0.0);
    g.cost_c = get_num_or(gj, "cost_c", 0.0);
    g.startup_cost = get_num_or(gj, "startup_cost", 0.0);
    g.shutdown_cost = get_num_or(gj, "shutdown_cost", 0.0);
    g.min_up = static_cast<int>(get_num_or(gj, "min_up", 1));
    g.min_down = static_cast<int>(get_num_or(gj, "min_down", 1));
    g.initial_on = gj.value("initial_on", false);
    g.initial_power = get_num_or(gj, "initial_power", 0.0);
    g.initial_state_duration = static_cast<int>(get_num_or(gj, "initial_state_duration", 1));
    c.generators.push_back(std::move(g));
  }

  if (!j.contains("loads")) throw ParseError("case must contain 'loads'");
  const auto& lj = j.at("loads");
  if (lj.is_string()) {
    std::filesystem::path p = lj.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    c.loads = loads_from_csv(p.string());
  } else {
    c.loads.nominal = get_vec(lj, "nominal");
    if (lj.contains("d_min") || lj.contains("d_max")) {
      c.loads.d_min = get_vec(lj, "d_min");
      c.loads.d_max = get_vec(lj, "d_max");
    } else {
      double f = get_num_or(lj, "uncertainty_fraction", 0.0);
      for (double nom : c.loads.nominal) {
        c.loads.d_min.push_back(nom * (1.0 - f));
        c.loads.d_max.push_back(nom * (1.0 + f));
      }
    }
    if (lj.contains("periods")) {
      int periods = static_cast<int>(get_num(lj, "periods"));
      if (periods != c.loads.periods())
        throw ParseError("'periods' does not match the length of the load vectors");
    }
  }

  c.shed_penalty = get_num_or(j, "shed_penalty", 1.0e4);
  c.n_segments = static_cast<int>(get_num_or(j, "n_segments", 10));
  validate_case(c);
  return c;
}

nlohmann::json case_to_json(const CaseDefinition& c) {
  nlohmann::json j;
  for (const auto& g : c.generators) {
    nlohmann::json gj;
    gj["id"] = g.id;
    gj["p_min"] = g.p_min;
    gj["p_max"] = g.p_max;
    gj["ramp_up"] = g.ramp_up;
    gj["ramp_down"] = g.ramp_down;
    gj["startup_ramp"] = g.startup_ramp;
    gj["shutdown_ramp"] = g.shutdown_ramp;
    gj["cost_a"] = g.cost_a;
    gj["cost_b"] = g.cost_b;
    gj["cost_c"] = g.cost_c;
    gj["startup_cost"] = g.startup_cost;
    gj["shutdown_cost"] = g.shutdown_cost;
    gj["min_up"] = g.min_up;
    gj["min_down"] = g.min_down;
    gj["initial_on"] = g.initial_on;
    gj["initial_power"] = g.initial_power;
    gj["initial_state_duration"] = g.initial_state_duration;
    j["generators"].push_back(gj);
  }
  j["loads"]["periods"] = c.loads.periods();
  j["loads"]["nominal"] = c.loads.nominal;
  j["loads"]["d_min"] = c.loads.d_min;
  j["loads"]["d_max"] = c.loads.d_max;
  j["shed_penalty"] = c.shed_penalty;
  j["n_segments"] = c.n_segments;
  return j;
}

CaseDefinition load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("case file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed case file " + path + ": " + e.what());
  }
  return case_from_json(j, std::filesystem::path(path).parent_path().string());
}

PiecewiseLinearCost linearize_cost(const GeneratorUnit& g, int n_segments) {
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  PiecewiseLinearCost plc;
  auto quad = [&](double p) { return g.cost_b * p + g.cost_c * p * p; };
  plc.fixed_cost = g.cost_a + quad(g.p_min);
  plc.breakpoints.resize(n_segments + 1);
  plc.slopes.resize(n_segments);
  const double width = (g.p_max - g.p_min) / n_segments;
  for (int i = 0; i <= n_segments; ++i)
    plc.breakpoints[i] = (i == n_segments) ? g.p_max : g.p_min + width * i;
  for (int i = 0; i < n_segments; ++i) {
    const double lo = plc.breakpoints[i], hi = plc.breakpoints[i + 1];
    plc.slopes[i] = hi > lo ? (quad(hi) - quad(lo)) / (hi - lo) : g.cost_b + 2.0 * g.cost_c * lo;
  }
  return plc;
}

double evaluate_cost(const PiecewiseLinearCost& plc, double p, bool committed) {
  if (!committed) {
    if (p != 0.0) throw std::domain_error("uncommitted unit must have p = 0");
    return 0.0;
  }
  const double lo = plc.breakpoints.front(), hi = plc.breakpoints.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));
  if (p < lo - slack || p > hi + slack)
    throw std::domain_error("p outside breakpoint range while committed");
  double cost = plc.fixed_cost;
  for (std::size_t i = 0; i < plc.slopes.size(); ++i) {
    const double seg_lo = plc.breakpoints[i], seg_hi = plc.breakpoints[i + 1];
    if (p <= seg_lo) break;
    cost += plc.slopes[i] * (std::min(p, seg_hi) - seg_lo);
  }
  return cost;
}

}  // namespace pcd
