#include "smmimo/dbm.hpp"

#include "smmimo/error.hpp"
#include "smmimo/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace smmimo {

double pathloss_gain(double distance_m, double gamma) {
  return std::pow(std::max(distance_m, kMinRangeM) / kRefRangeM, -gamma);
}

std::vector<PilotReception> receptions_from_powers(int ut_id, std::span<const int> antenna_ids,
                                                   std::span<const double> delay_distances,
                                                   std::span<const double> powers,
                                                   double noise_floor) {
  if (antenna_ids.size() != powers.size() || delay_distances.size() != powers.size()) {
    throw Error(Errc::InvalidArgument, "reception columns differ in length");
  }
  double strongest = 0.0;
  for (double p : powers) {
    if (p >= noise_floor) strongest = std::max(strongest, p);
  }
  if (!(strongest > 0.0)) {
    throw Error(Errc::NoCoverage, "UT " + std::to_string(ut_id) + " heard by no antenna");
  }
  std::vector<PilotReception> out;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] < noise_floor) continue;
    out.push_back({antenna_ids[i], ut_id, delay_distances[i], powers[i] / strongest});
  }
  std::sort(out.begin(), out.end(), [](const PilotReception& a, const PilotReception& b) {
    return a.sqw != b.sqw ? a.sqw > b.sqw : a.antenna_id < b.antenna_id;
  });
  return out;
}

std::vector<PilotReception> broadcast_pilot(const Scenario& scenario, int ut_id,
                                            const PilotOptions& options) {
  const auto& ut = scenario.uts.at(ut_id);
  const double gamma = scenario.config.pathloss_exponent;
  const std::size_t n = scenario.antennas.size();
  std::vector<int> ids(n);
  std::vector<double> delays(n), powers(n);
  CounterRng noise(options.noise_seed, (options.epoch << 32) | static_cast<std::uint32_t>(ut_id));
  for (std::size_t a = 0; a < n; ++a) {
    const double d = (scenario.antennas[a].position - ut.position).norm();
    ids[a] = scenario.antennas[a].id;
    powers[a] = ut.tx_power * pathloss_gain(d, gamma);
    delays[a] = d;
    if (options.range_noise_sigma_m > 0.0) {
      delays[a] = std::max(0.0, d + options.range_noise_sigma_m * noise.normal());
    }
  }
  return receptions_from_powers(ut_id, ids, delays, powers, scenario.config.noise_floor);
}

CandidateSet select_candidates(std::span<const PilotReception> receptions, double mu) {
  CandidateSet set;
  set.mu = mu;
  if (receptions.empty()) return set;
  set.ut_id = receptions.front().ut_id;
  double max_sqw = 0.0;
  for (const auto& r : receptions) max_sqw = std::max(max_sqw, r.sqw);
  std::vector<const PilotReception*> chosen;
  for (const auto& r : receptions) {
    if (meets_acceptance(r.sqw, max_sqw, mu)) chosen.push_back(&r);
  }
  std::sort(chosen.begin(), chosen.end(), [](const PilotReception* a, const PilotReception* b) {
    return a->sqw != b->sqw ? a->sqw > b->sqw : a->antenna_id < b->antenna_id;
  });
  for (const auto* r : chosen) {
    set.antenna_ids.push_back(r->antenna_id);
    set.sqw.push_back(r->sqw);
  }
  return set;
}

std::vector<int> decide_serving_set(const CandidateSet& candidates, int serve_quota) {
  const std::size_t keep = serve_quota <= 0
                               ? candidates.antenna_ids.size()
                               : std::min<std::size_t>(serve_quota, candidates.antenna_ids.size());
  return {candidates.antenna_ids.begin(), candidates.antenna_ids.begin() + keep};
}

DbmUpdate update_dbm(DelayBasedMap dbm, std::span<const PilotReception> receptions,
                     std::uint64_t epoch) {
  DbmUpdate out;
  for (const auto& r : receptions) {
    if (r.antenna_id != dbm.antenna_id) continue;
    DbmEntry fresh{r.delay_distance, r.sqw, epoch};
    auto [it, inserted] = dbm.entries.try_emplace(r.ut_id, fresh);
    if (!inserted) {
      const bool major = std::abs(it->second.delay_distance - r.delay_distance) > kMajorDelayChangeM ||
                         std::abs(it->second.sqw - r.sqw) > kMajorSqwChange;
      it->second = fresh;
      if (major) out.major_updates.push_back(r.ut_id);
    } else {
      out.major_updates.push_back(r.ut_id);
    }
  }
  out.map = std::move(dbm);
  return out;
}

Point2 locate_ut(std::span<const RangeAnchor> anchors) {
  const Eigen::Index n = static_cast<Eigen::Index>(anchors.size());
  if (n < 3) throw Error(Errc::InsufficientAnchors, "need at least 3 anchors, got " + std::to_string(n));

  Eigen::MatrixX2d pos(n, 2);
  Eigen::VectorXd range(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pos.row(i) = anchors[i].position.transpose();
    range(i) = anchors[i].distance;
  }
  const Eigen::RowVector2d centroid = pos.colwise().mean();
  const Eigen::MatrixX2d centered = pos.rowwise() - centroid;
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::MatrixX2d>(centered).singularValues();
  if (!(sv(0) > 0.0) || sv(1) < 1e-9 * sv(0)) {
    throw Error(Errc::DegenerateGeometry, "anchors are collinear");
  }

  // Subtracting the first range equation from the others leaves a linear
  // system in the centroid-relative position.
  Eigen::MatrixX2d lhs(n - 1, 2);
  Eigen::VectorXd rhs(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    lhs.row(i - 1) = 2.0 * (centered.row(i) - centered.row(0));
    rhs(i - 1) = centered.row(i).squaredNorm() - centered.row(0).squaredNorm() -
                 range(i) * range(i) + range(0) * range(0);
  }
  Eigen::Vector2d x = lhs.colPivHouseholderQr().solve(rhs);

  auto residuals = [&](const Eigen::Vector2d& p) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = (p - centered.row(i).transpose()).norm() - range(i);
    return r;
  };

  Eigen::VectorXd r = residuals(x);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::MatrixX2d jac(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Vector2d diff = x - centered.row(i).transpose();
      const double norm = diff.norm();
      if (norm > 1e-12) jac.row(i) = (diff / norm).transpose();
      else jac.row(i).setZero();
    }
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) break;

    // Backtrack until the squared residual does not grow.
    double scale = 1.0;
    Eigen::Vector2d trial = x + step;
    Eigen::VectorXd trial_r = residuals(trial);
    for (int halvings = 0; halvings < 30 && trial_r.squaredNorm() > r.squaredNorm(); ++halvings) {
      scale *= 0.5;
      trial = x + scale * step;
      trial_r = residuals(trial);
    }
    if (trial_r.squaredNorm() > r.squaredNorm()) break;
    x = trial;
    r = trial_r;
    if ((scale * step).norm() < 1e-9) break;
  }
  return x + centroid.transpose();
}

std::vector<VirtualCell> form_virtual_cells(std::span<const ServingSet> serving,
                                            std::span<const int> antenna_vn) {
  std::map<int, VirtualCell> by_vn;
  std::map<int, std::set<int>> antennas_by_vn;
  for (const auto& s : serving) {
    if (s.antenna_ids.empty()) {
      throw Error(Errc::InvalidArgument, "UT " + std::to_string(s.ut_id) + " has an empty serving set");
    }
    std::map<int, int> votes;
    for (int a : s.antenna_ids) ++votes[antenna_vn[a]];
    int winner = votes.begin()->first;
    for (const auto& [vn, count] : votes) {
      if (count > votes[winner]) winner = vn;  // map order keeps the lowest id on ties
    }
    auto& cell = by_vn[winner];
    cell.vn_id = winner;
    cell.vc_id = winner;
    cell.ut_ids.push_back(s.ut_id);
    for (int a : s.antenna_ids) {
      if (antenna_vn[a] == winner) antennas_by_vn[winner].insert(a);
    }
  }
  std::vector<VirtualCell> cells;
  for (auto& [vn, cell] : by_vn) {
    std::sort(cell.ut_ids.begin(), cell.ut_ids.end());
    const auto& ants = antennas_by_vn[vn];
    cell.antenna_ids.assign(ants.begin(), ants.end());
    cells.push_back(std::move(cell));
  }
  return cells;
}

IsolationReport check_isolation(std::span<const VirtualCell> cells,
                                std::span<const ServingSet> serving) {
  std::map<int, std::size_t> cell_of_ut;
  std::vector<std::set<int>> antenna_sets(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int u : cells[c].ut_ids) cell_of_ut[u] = c;
    antenna_sets[c].insert(cells[c].antenna_ids.begin(), cells[c].antenna_ids.end());
  }

  IsolationReport report;
  // cross[c][d]: serving links from UTs of cell c landing on antennas of cell d.
  std::vector<std::vector<int>> cross(cells.size(), std::vector<int>(cells.size(), 0));
  for (const auto& s : serving) {
    auto it = cell_of_ut.find(s.ut_id);
    if (it == cell_of_ut.end()) {
      throw Error(Errc::InvalidArgument, "UT " + std::to_string(s.ut_id) + " is in no cell");
    }
    const std::size_t own = it->second;
    for (int a : s.antenna_ids) {
      ++report.total_links;
      if (antenna_sets[own].contains(a)) continue;
      ++report.outside_links;
      for (std::size_t d = 0; d < cells.size(); ++d) {
        if (d != own && antenna_sets[d].contains(a)) ++cross[own][d];
      }
    }
  }
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      CellPairInterference pair;
      pair.vc_a = cells[a].vc_id;
      pair.vc_b = cells[b].vc_id;
      for (int ant : antenna_sets[a]) pair.shared_antennas += antenna_sets[b].contains(ant) ? 1 : 0;
      pair.cross_service = cross[a][b] + cross[b][a];
      report.pairs.push_back(pair);
    }
  }
  report.leakage = report.total_links > 0
                       ? static_cast<double>(report.outside_links) / report.total_links
                       : 0.0;
  return report;
}

std::vector<int> antenna_vn_by_pn(const Scenario& scenario) {
  std::vector<int> vn(scenario.antennas.size());
  for (const auto& a : scenario.antennas) vn[a.id] = a.pn_id;
  return vn;
}

AccessResult run_access_procedure(const Scenario& scenario, std::uint64_t epoch) {
  AccessResult result;
  const double mu = std::max(scenario.config.mu, kMuFloor);
  PilotOptions options;
  options.range_noise_sigma_m = scenario.config.range_noise_sigma_m;
  options.noise_seed = scenario.config.seed;
  options.epoch = epoch;

  std::vector<std::vector<PilotReception>> per_antenna(scenario.antennas.size());
  for (const auto& ut : scenario.uts) {
    std::vector<PilotReception> receptions;
    try {
      receptions = broadcast_pilot(scenario, ut.id, options);
    } catch (const Error& e) {
      if (e.code() != Errc::NoCoverage) throw;
      result.uncovered_uts.push_back(ut.id);
      continue;
    }
    for (const auto& r : receptions) per_antenna[r.antenna_id].push_back(r);
    auto candidates = select_candidates(receptions, mu);
    result.serving.push_back({ut.id, decide_serving_set(candidates, scenario.config.serve_quota)});
    result.candidates.push_back(std::move(candidates));
  }

  result.dbms.resize(scenario.antennas.size());
  for (std::size_t a = 0; a < scenario.antennas.size(); ++a) {
    DelayBasedMap empty;
    empty.antenna_id = static_cast<int>(a);
    result.dbms[a] = update_dbm(std::move(empty), per_antenna[a], epoch).map;
  }

  const auto antenna_vn = antenna_vn_by_pn(scenario);
  result.cells = form_virtual_cells(result.serving, antenna_vn);
  result.isolation = check_isolation(result.cells, result.serving);
  return result;
}

}  // namespace smmimo
