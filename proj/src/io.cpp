#include "crowdrate/io.hpp"

#include <cmath>
#include <ostream>

namespace crowdrate {

using nlohmann::json;

namespace {
// JSON has no infinities; non-finite values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json to_json(const EnergyReport& r) {
  return {{"sigma", num(r.sigma)},
          {"potential_term", num(r.potential_term)},
          {"i_beta", num(r.i_beta)},
          {"c_beta_used", num(r.c_beta_used)},
          {"diagonal_correction", num(r.diagonal_correction)}};
}

json to_json(const ElReport& r) {
  return {{"on_support_deviation", num(r.on_support_deviation)},
          {"off_support_violation", num(r.off_support_violation)},
          {"constants", r.constants},
          {"support_size", r.support_size},
          {"passed", r.passed}};
}

json to_json(const ObstacleReport& r) {
  return {{"max_relative_error", num(r.max_relative_error)},
          {"eroded_nodes", r.eroded_nodes},
          {"max_density", num(r.max_density)},
          {"max_eroded_density", num(r.max_eroded_density)},
          {"density_bound", num(r.density_bound)},
          {"off_support_max_density", num(r.off_support_max_density)},
          {"passed", r.passed}};
}

json to_json(const M1StarReport& r) {
  return {{"passed", r.passed},
          {"c", num(r.c)},
          {"worst_ratio", num(r.worst_ratio)},
          {"eps", r.eps},
          {"tube_mass", r.tube_mass}};
}

json to_json(const PartitionReport& r) {
  return {{"c_beta", num(r.c_beta)},
          {"normalized_infimum", num(r.normalized_infimum)},
          {"predicted_limit", num(r.predicted_limit)},
          {"converged", r.converged},
          {"caveat", r.caveat}};
}

json to_json(const SeparationReport& r) {
  return {{"passed", r.passed}, {"min_distance", num(r.min_distance)}, {"bound", num(r.bound)}};
}

json to_json(const WeakConvergenceReport& r) {
  json j = {{"ns", r.ns}, {"distances", r.distances}, {"bound", r.bound}};
  j["decreasing"] = r.decreasing ? json(*r.decreasing) : json(nullptr);
  j["passed"] = r.passed ? json(*r.passed) : json(nullptr);
  return j;
}

json to_json(const ChainSummary& s) {
  return {{"chain", s.chain_id},
          {"final_step", s.final_step},
          {"burn_in_acceptance", s.burn_in_acceptance},
          {"acceptance_rate", s.acceptance_rate},
          {"retained", s.retained},
          {"step_warning", s.step_warning}};
}

json cells_json(const ConstructedPoints& pts) {
  json cells = json::array();
  for (const auto& c : pts.cells) {
    if (!c.strip) {
      const Box& b = c.pieces.front();
      cells.push_back({{"kind", "rectangle"}, {"corners", {{b.x_lo, b.y_lo}, {b.x_hi, b.y_hi}}}});
    } else {
      json verts = json::array();
      for (const auto& p : c.polygon) verts.push_back({p.x, p.y});
      cells.push_back({{"kind", "strip"}, {"vertices", verts}});
    }
  }
  return {{"case", pts.case_tag == ConstructedPoints::Case::PerfectSquare ? "perfect-square" : "general"},
          {"m", pts.m},
          {"k", pts.k},
          {"column_cuts", pts.column_cuts},
          {"cells", cells}};
}

void write_rate_profile_csv(std::ostream& out, const RateProfile& profile) {
  const auto old = out.precision(17);
  out << "x,gamma,iterations,el_residual,converged\n";
  for (std::size_t i = 0; i < profile.xs.size(); ++i) {
    const auto& d = profile.diagnostics[i];
    out << profile.xs[i] << ',' << profile.gammas[i] << ',' << d.iterations << ',' << d.el_residual << ','
        << (d.converged ? 1 : 0) << '\n';
  }
  out.precision(old);
}

}  // namespace crowdrate
