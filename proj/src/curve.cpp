#include "csmgeo/curve.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

Curve Curve::make(DfaType dfa, std::vector<double> t, std::vector<std::vector<double>> points) {
  if (t.size() != points.size() || t.size() < 2)
    throw std::invalid_argument("curve: need matching t/point arrays with >= 2 samples");
  for (size_t i = 1; i < t.size(); i++)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("curve: times must strictly increase");
  for (const auto& p : points) Machine::make(dfa, p);  // validates each sample
  Curve c;
  c.dfa = std::move(dfa);
  c.t = std::move(t);
  c.points = std::move(points);
  return c;
}

// Midpoint-rule g(v, v) of the chord over [prev, i]; the chord velocity is centered
// per state row to project away the roundoff that dividing by a tiny dt amplifies.
static double segment_speed2(const Curve& c, int prev, int i) {
  double dt = c.t[i] - c.t[prev];
  std::vector<double> mid(c.points[i].size()), vel(c.points[i].size());
  for (size_t e = 0; e < mid.size(); e++) {
    mid[e] = 0.5 * (c.points[i][e] + c.points[prev][e]);
    vel[e] = (c.points[i][e] - c.points[prev][e]) / dt;
  }
  for (int j = 0; j < c.dfa.n_states; j++) {
    double row = 0.0;
    for (int e : c.dfa.state_edges[j]) row += vel[e];
    double shift = row / static_cast<double>(c.dfa.state_edges[j].size());
    for (int e : c.dfa.state_edges[j]) vel[e] -= shift;
  }
  Machine mm = Machine::make(c.dfa, mid);
  TangentVector v = TangentVector::make(c.dfa, vel);
  return metric_apply(mm, v, v);
}

// accumulate = f(speed2, dt) summed over sample segments at the given stride
template <class F>
static double over_samples(const Curve& c, int stride, F f) {
  double acc = 0.0;
  int prev = 0;
  for (int i = stride; i < c.size(); i += stride) {
    acc += f(segment_speed2(c, prev, i), c.t[i] - c.t[prev]);
    prev = i;
  }
  // tail segment when the stride does not divide the sample count
  int last = c.size() - 1;
  if (prev != last) acc += f(segment_speed2(c, prev, last), c.t[last] - c.t[prev]);
  return acc;
}

EnergyEstimate curve_energy(const Curve& c) {
  auto seg = [](double s2, double dt) { return 0.5 * s2 * dt; };
  EnergyEstimate est;
  est.value = over_samples(c, 1, seg);
  if (c.size() >= 5) {
    double coarse = over_samples(c, 2, seg);
    est.refined_error = std::abs(est.value - coarse) / 3.0;  // midpoint rule is order 2
  }
  return est;
}

EnergyEstimate curve_length(const Curve& c) {
  auto seg = [](double s2, double dt) { return std::sqrt(s2) * dt; };
  EnergyEstimate est;
  est.value = over_samples(c, 1, seg);
  if (c.size() >= 5) {
    double coarse = over_samples(c, 2, seg);
    est.refined_error = std::abs(est.value - coarse) / 3.0;
  }
  return est;
}

void write_curve_csv(const Curve& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write curve csv: " + path);
  f << "t";
  for (const auto& [j, a] : c.dfa.edge_list)
    f << ",q_" << j << "_" << c.dfa.alphabet.symbols[a];
  f << "\n";
  for (int i = 0; i < c.size(); i++) {
    f << fmt17(c.t[i]);
    for (double x : c.points[i]) f << "," << fmt17(x);
    f << "\n";
  }
}

Curve read_curve_csv(const std::string& path, const DfaType& dfa) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open curve csv: " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty curve csv");
  // header check
  std::string expect = "t";
  for (const auto& [j, a] : dfa.edge_list)
    expect += ",q_" + std::to_string(j) + "_" + dfa.alphabet.symbols[a];
  if (trim(line) != expect)
    throw std::runtime_error(path + ": header mismatch, expected '" + expect + "'");
  std::vector<double> t;
  std::vector<std::vector<double>> points;
  int lineno = 1;
  while (std::getline(f, line)) {
    lineno++;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != dfa.n_edges() + 1)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong column count");
    t.push_back(row[0]);
    points.emplace_back(row.begin() + 1, row.end());
  }
  return Curve::make(dfa, std::move(t), std::move(points));
}

}  // namespace csmgeo
