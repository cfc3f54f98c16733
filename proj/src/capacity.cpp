#include "smmimo/capacity.hpp"

#include "smmimo/random.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace smmimo {
namespace {

using Gram = ComplexMatrix<double>;

/// Runs `body(trial)` for every trial on up to `threads` workers. Results are
/// stored by trial index; the first failure (lowest trial) is rethrown.
template <typename Result, typename Body>
std::vector<Result> run_trials(int trials, int threads, Body body) {
  std::vector<Result> results(trials);
  std::vector<std::exception_ptr> errors(trials);
  const int workers = std::clamp(threads, 1, std::max(trials, 1));
  auto work = [&](int first) {
    for (int t = first; t < trials; t += workers) {
      try {
        results[t] = body(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (int t = 0; t < trials; ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(t) + ": " + e.what());
    }
  }
  return results;
}

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
};

Summary summarize(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// One trial's Gram matrix for a cell. iid: fresh draw and a mask built from
/// its instantaneous powers. Pathloss: geometry-scaled draw, mask fixed by
/// mean powers.
struct CellModel {
  Eigen::Index antennas = 0;
  Eigen::Index users = 0;
  double mu = 1.0;
  MaskMode mask_mode = MaskMode::Full;
  const Eigen::MatrixXd* variance = nullptr;  ///< null for iid
  MaskMatrix fixed_mask;                      ///< pathloss only

  Gram trial_gram(std::uint64_t seed, int trial) const {
    if (variance) {
      const auto ch = draw_channel(*variance, seed, static_cast<std::uint64_t>(trial));
      return gram(apply_mask(ch.h, fixed_mask));
    }
    const auto ch = draw_channel(antennas, users, seed, static_cast<std::uint64_t>(trial));
    if (mask_mode == MaskMode::Full) return gram(ch.h);
    const Eigen::MatrixXd power = ch.h.cwiseAbs2();
    return gram(apply_mask(ch.h, build_mask(power, mu)));
  }
};

void check_trials(int trials) {
  if (trials < 2) throw Error(Errc::InvalidArgument, "at least 2 trials required");
}

}  // namespace

ChannelRealization draw_channel(Eigen::Index antennas, Eigen::Index users, std::uint64_t seed,
                                std::uint64_t trial_index) {
  if (antennas < 1 || users < 1) throw Error(Errc::InvalidArgument, "channel needs M, K >= 1");
  ChannelRealization ch;
  ch.seed = seed;
  ch.trial_index = trial_index;
  ch.h.resize(antennas, users);
  for (Eigen::Index k = 0; k < users; ++k) {
    for (Eigen::Index m = 0; m < antennas; ++m) {
      ch.h(m, k) = complex_normal_at(seed, trial_index, static_cast<std::uint32_t>(m),
                                     static_cast<std::uint32_t>(k));
    }
  }
  return ch;
}

ChannelRealization draw_channel(const Eigen::MatrixXd& variance, std::uint64_t seed,
                                std::uint64_t trial_index) {
  auto ch = draw_channel(variance.rows(), variance.cols(), seed, trial_index);
  ch.h.array() *= variance.array().sqrt().cast<std::complex<double>>();
  return ch;
}

CapacityPoint ergodic_capacity(const ErgodicSpec& spec) {
  check_trials(spec.trials);
  if (spec.antennas < 1 || spec.users < 1) throw Error(Errc::InvalidArgument, "cell needs M, K >= 1");
  CellModel model{spec.antennas, spec.users, std::max(spec.mu, kMuFloor), spec.mask_mode, nullptr, {}};
  const double rho_eff =
      effective_snr(db_to_linear(spec.snr_db), spec.alpha, static_cast<double>(spec.k_interferers));
  const auto samples = run_trials<double>(spec.trials, spec.threads, [&](int t) {
    return gram_capacity(model.trial_gram(spec.seed, t), rho_eff);
  });
  const auto s = summarize(samples);
  return {spec.snr_db, spec.alpha, spec.mu, spec.mask_mode, s.mean, s.std_error, spec.trials};
}

CellGeometry cell_geometry(const Scenario& scenario, int vn_id) {
  const auto access = run_access_procedure(scenario);
  CellGeometry geo;
  for (const auto& cell : access.cells) {
    if (cell.vn_id == vn_id) geo.ut_ids = cell.ut_ids;
  }
  if (geo.ut_ids.empty()) {
    throw Error(Errc::NoCoverage, "virtual cell of VN " + std::to_string(vn_id) + " has no UTs");
  }
  const auto [first, last] = scenario.antenna_range(vn_id);
  for (int a = first; a < last; ++a) geo.antenna_ids.push_back(a);
  geo.variance.resize(static_cast<Eigen::Index>(geo.antenna_ids.size()),
                      static_cast<Eigen::Index>(geo.ut_ids.size()));
  for (Eigen::Index k = 0; k < geo.variance.cols(); ++k) {
    const auto& ut = scenario.uts[geo.ut_ids[k]];
    for (Eigen::Index m = 0; m < geo.variance.rows(); ++m) {
      const double d = (scenario.antennas[geo.antenna_ids[m]].position - ut.position).norm();
      geo.variance(m, k) = ut.tx_power * pathloss_gain(d, scenario.config.pathloss_exponent);
    }
  }
  return geo;
}

CapacityCurve sweep_curve(const ScenarioConfig& config, int threads) {
  const auto report = validate_config(config);
  if (!report.empty()) throw Error(Errc::InvalidConfig, report.front());

  CellModel model;
  model.mu = std::max(config.mu, kMuFloor);
  model.mask_mode = config.mask_mode;
  CellGeometry geo;
  if (config.channel_model == ChannelModel::Pathloss) {
    geo = cell_geometry(build_scenario(config));
    model.antennas = geo.variance.rows();
    model.users = geo.variance.cols();
    model.variance = &geo.variance;
    model.fixed_mask = config.mask_mode == MaskMode::Full ? full_mask(model.antennas, model.users)
                                                          : build_mask(geo.variance, model.mu);
  } else {
    model.antennas = config.antennas_per_pn;
    model.users = config.uts_per_cell();
    if (model.users < 1) throw Error(Errc::InvalidConfig, "ut_count / pn_count must be >= 1");
  }
  const double k_interferers =
      static_cast<double>(config.k_interferers.value_or(static_cast<int>(model.users)));

  std::vector<double> alphas = config.alpha_list;
  std::vector<double> snrs = config.snr_grid_db;
  std::sort(alphas.begin(), alphas.end());
  std::sort(snrs.begin(), snrs.end());
  std::vector<double> rho_eff;
  for (double a : alphas) {
    for (double s : snrs) rho_eff.push_back(effective_snr(db_to_linear(s), a, k_interferers));
  }

  const auto per_trial = run_trials<std::vector<double>>(config.mc_trials, threads, [&](int t) {
    const Gram g = model.trial_gram(config.seed, t);
    std::vector<double> caps(rho_eff.size());
    for (std::size_t c = 0; c < rho_eff.size(); ++c) caps[c] = gram_capacity(g, rho_eff[c]);
    return caps;
  });

  CapacityCurve curve;
  curve.seed = config.seed;
  std::size_t cell = 0;
  for (double a : alphas) {
    for (double s : snrs) {
      std::vector<double> samples(per_trial.size());
      for (std::size_t t = 0; t < per_trial.size(); ++t) samples[t] = per_trial[t][cell];
      const auto sum = summarize(samples);
      curve.points.push_back({s, a, config.mu, config.mask_mode, sum.mean, sum.std_error, config.mc_trials});
      ++cell;
    }
  }
  return curve;
}

AlphaCalibration calibrate_alpha(const ErgodicSpec& spec, double target_bps_hz,
                                 double alpha_tolerance) {
  check_trials(spec.trials);
  CellModel model{spec.antennas, spec.users, std::max(spec.mu, kMuFloor), spec.mask_mode, nullptr, {}};
  const auto grams = run_trials<Gram>(spec.trials, spec.threads,
                                      [&](int t) { return model.trial_gram(spec.seed, t); });
  const double rho = db_to_linear(spec.snr_db);
  const double k = static_cast<double>(spec.k_interferers);
  auto mean_at = [&](double alpha) {
    std::vector<double> samples;
    samples.reserve(grams.size());
    for (const auto& g : grams) samples.push_back(gram_capacity(g, effective_snr(rho, alpha, k)));
    return summarize(samples).mean;
  };

  double lo = 0.0;  // capacity(lo) >= target
  double hi = 1.0;  // capacity(hi) <= target
  if (mean_at(lo) < target_bps_hz) {
    throw Error(Errc::InvalidArgument, "target exceeds the isolated-cell capacity");
  }
  if (mean_at(hi) > target_bps_hz) return {hi, mean_at(hi), 0};
  AlphaCalibration out;
  while (hi - lo > alpha_tolerance && out.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) >= target_bps_hz ? lo : hi) = mid;
    ++out.iterations;
  }
  out.alpha = 0.5 * (lo + hi);
  out.mean_capacity = mean_at(out.alpha);
  return out;
}

}  // namespace smmimo
