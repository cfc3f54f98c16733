#include "smmimo/cli.hpp"

#include "smmimo/accounting.hpp"
#include "smmimo/bootstrap.hpp"
#include "smmimo/capacity.hpp"
#include "smmimo/config_io.hpp"
#include "smmimo/dbm.hpp"
#include "smmimo/error.hpp"
#include "smmimo/report.hpp"
#include "smmimo/vnode.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace smmimo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Config-class failures map to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path sibling(const fs::path& out, const std::string& suffix, const std::string& ext = "") {
  auto name = out.stem().string() + suffix + (ext.empty() ? out.extension().string() : ext);
  return out.parent_path() / name;
}

/// Output files of one run, in the order they are committed.
struct Artifacts {
  std::vector<std::pair<fs::path, std::string>> files;
  void add(const fs::path& path, std::string content) { files.emplace_back(path, std::move(content)); }
};

struct Invocation {
  std::string subcommand;
  ScenarioConfig config;
  json options = json::object();  ///< subcommand flags other than paths
  fs::path out;
  json paths = json::object();    ///< extra output paths by role
};

// --- subcommands -------------------------------------------------------------

void run_init(const Invocation& inv, Artifacts& artifacts) {
  const auto scenario = build_scenario(inv.config);
  std::map<int, std::vector<int>> faults;
  for (const auto& f : inv.options.value("faults", json::array())) {
    faults[f.at(0).get<int>()].push_back(f.at(1).get<int>());
  }
  auto run = run_initialization(scenario, faults);
  Backbone backbone = run.backbone;
  for (int dead : inv.options.value("kill", std::vector<int>{})) {
    backbone = handle_failure(backbone, dead);
    std::cerr << "init: PN " << dead << " failed; backbone rebuilt in " << backbone.rounds << " rounds\n";
  }
  std::cerr << "init: " << scenario.nodes.size() - run.excluded.size() << " PNs booted, "
            << run.excluded.size() << " excluded, exchange converged in " << run.backbone.rounds
            << " rounds\n";
  artifacts.add(inv.out, connection_maps_csv(backbone.maps));
  artifacts.add(inv.paths.at("events").get<std::string>(), event_log_csv(run.event_log));
}

void run_dbm(const Invocation& inv, Artifacts& artifacts) {
  const auto scenario = build_scenario(inv.config);
  const auto access = run_access_procedure(scenario, inv.options.value("epoch", std::uint64_t{0}));
  std::cerr << "dbm: " << access.cells.size() << " virtual cells, " << access.uncovered_uts.size()
            << " uncovered UTs, leakage " << format_number(access.isolation.leakage) << " ("
            << access.isolation.outside_links << "/" << access.isolation.total_links << ")\n";
  artifacts.add(inv.out, dbm_csv(access.dbms));
  artifacts.add(inv.paths.at("cells").get<std::string>(), cells_csv(access.cells, access.serving));
  artifacts.add(inv.paths.at("isolation").get<std::string>(), isolation_csv(access.isolation));
}

void run_capacity(const Invocation& inv, Artifacts& artifacts) {
  const int threads = inv.options.value("threads", 1);
  const auto curve = sweep_curve(inv.config, threads);
  artifacts.add(inv.out, capacity_csv(curve));
  if (inv.paths.contains("svg")) {
    artifacts.add(inv.paths.at("svg").get<std::string>(), capacity_svg(curve));
  }
}

void run_offload(const Invocation& inv, Artifacts& artifacts) {
  OffloadSpec spec;
  spec.flows = inv.options.value("flows", 100);
  spec.internet_fraction = inv.options.value("internet_fraction", inv.config.internet_fraction);
  spec.depth = inv.options.value("depth", 2);
  spec.branching = inv.options.value("branching", 2);
  spec.seed = inv.config.seed;
  const auto mode = inv.options.value("mode", std::string("distributed"));
  if (mode == "centralized") spec.mode = PgwMode::Centralized;
  else if (mode == "distributed") spec.mode = PgwMode::Distributed;
  else throw ConfigError("--mode must be centralized or distributed");
  artifacts.add(inv.out, offload_csv({offload_experiment(spec)}));
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad number for " + what + ": '" + text + "'");
  return value;
}

void run_squ(const Invocation& inv, Artifacts& artifacts) {
  SquWeights w;
  const auto& o = inv.options;
  w.data_urgency = o.value("w_urgency", 1.0);
  w.energy_cost = o.value("w_energy", 1.0);
  w.distance_to_destination = o.value("w_distance", 1.0);
  w.signaling_cost = o.value("w_signaling", 1.0);
  w.content_quality = o.value("w_quality", 1.0);
  if (auto bad = validate(w); !bad.empty()) throw ConfigError(bad.front());

  const auto input = o.value("input", std::string());
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot open vectors file '" + input + "'");
  std::string line;
  std::vector<PricedFlow> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;  // header
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (cols.size() != 6) throw ConfigError("line " + std::to_string(line_no) + ": expected 6 columns");
    SquVector v;
    v.data_urgency = parse_double(cols[1], "data_urgency");
    v.energy_cost = parse_double(cols[2], "energy_cost");
    v.distance_to_destination = parse_double(cols[3], "distance_to_destination");
    v.signaling_cost = parse_double(cols[4], "signaling_cost");
    v.content_quality = parse_double(cols[5], "content_quality");
    if (auto bad = validate(v); !bad.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + bad.front());
    }
    rows.push_back({cols[0], compute_squ(v, w)});
  }
  artifacts.add(inv.out, squ_csv(rows));
}

void run_calibrate(const Invocation& inv, Artifacts& artifacts) {
  ErgodicSpec spec;
  spec.antennas = inv.config.antennas_per_pn;
  spec.users = inv.config.uts_per_cell();
  spec.mu = inv.config.mu;
  spec.mask_mode = inv.config.mask_mode;
  spec.k_interferers = inv.config.interferers();
  spec.trials = inv.config.mc_trials;
  spec.seed = inv.config.seed;
  spec.threads = inv.options.value("threads", 1);
  spec.snr_db = inv.options.value("snr_db", 10.0);
  const double target = inv.options.value("target", 900.0);
  const auto cal = calibrate_alpha(spec, target);
  json out;
  out["alpha"] = cal.alpha;
  out["mean_capacity_bps_hz"] = cal.mean_capacity;
  out["iterations"] = cal.iterations;
  out["target_bps_hz"] = target;
  out["snr_db"] = spec.snr_db;
  out["antennas"] = spec.antennas;
  out["users"] = spec.users;
  out["k_interferers"] = spec.k_interferers;
  out["trials"] = spec.trials;
  out["seed"] = spec.seed;
  std::cerr << "calibrate: alpha* = " << format_number(cal.alpha) << " gives "
            << format_number(cal.mean_capacity) << " bps/Hz\n";
  artifacts.add(inv.out, out.dump(2) + "\n");
}

using Runner = void (*)(const Invocation&, Artifacts&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"init", run_init},       {"dbm", run_dbm}, {"capacity", run_capacity},
      {"offload", run_offload}, {"squ", run_squ}, {"calibrate", run_calibrate},
  };
  return table;
}

json manifest_for(const Invocation& inv, const Artifacts& artifacts) {
  json m;
  m["tool"] = "smmimo";
  m["tool_version"] = kToolVersion;
  m["subcommand"] = inv.subcommand;
  m["seed"] = inv.config.seed;
  m["config"] = config_to_json(inv.config);
  m["options"] = inv.options;
  json paths = json::array();
  for (const auto& [p, content] : artifacts.files) paths.push_back(p.string());
  m["artifacts"] = paths;
  return m;
}

void execute(const Invocation& inv) {
  if (auto report = validate_config(inv.config); !report.empty()) {
    std::string joined;
    for (const auto& line : report) joined += "\n  " + line;
    throw ConfigError("invalid config:" + joined);
  }
  Artifacts artifacts;
  runners().at(inv.subcommand)(inv, artifacts);
  const auto manifest = sibling(inv.out, "", ".manifest.json");
  artifacts.add(manifest, manifest_for(inv, artifacts).dump(2) + "\n");
  // Everything is computed before the first file lands.
  for (const auto& [path, content] : artifacts.files) write_file_atomic(path, content);
}

void fill_paths(Invocation& inv, const std::map<std::string, std::string>& explicit_paths) {
  auto pick = [&](const std::string& role, const std::string& suffix) {
    auto it = explicit_paths.find(role);
    inv.paths[role] = (it != explicit_paths.end() && !it->second.empty())
                          ? it->second
                          : sibling(inv.out, suffix).string();
  };
  if (inv.subcommand == "init") pick("events", "_events");
  if (inv.subcommand == "dbm") {
    pick("cells", "_cells");
    pick("isolation", "_isolation");
  }
  if (inv.subcommand == "capacity") {
    auto it = explicit_paths.find("svg");
    if (it != explicit_paths.end() && !it->second.empty()) inv.paths["svg"] = it->second;
  }
}

Invocation from_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot open manifest " + manifest_path.string());
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw ConfigError(manifest_path.string() + ": " + e.what());
  }
  Invocation inv;
  inv.subcommand = m.at("subcommand").get<std::string>();
  if (!runners().contains(inv.subcommand)) throw ConfigError("manifest names unknown subcommand");
  inv.config = config_from_json(m.at("config")).config;
  inv.options = m.value("options", json::object());
  return inv;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Smart massive MIMO network simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_path, out_path, svg_path, events_path, cells_path, isolation_path, input_path,
      manifest_path, mode = "distributed";
  std::optional<std::uint64_t> seed;
  int threads = 1, flows = 100, depth = 2, branching = 2;
  std::optional<double> internet_fraction;
  std::uint64_t epoch = 0;
  std::vector<int> kill;
  std::vector<std::string> faults;
  double w_urgency = 1, w_energy = 1, w_distance = 1, w_signaling = 1, w_quality = 1;
  double snr_db = 10.0, target = 900.0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "ScenarioConfig JSON file");
    if (config_required) opt->required();
    sub->add_option("--out", out_path, "primary output file");
    sub->add_option("--seed", seed, "overrides the config seed");
  };

  auto* init = app.add_subcommand("init", "boot PNs and dump the self-assembled connection maps");
  add_common(init, true);
  init->add_option("--events", events_path, "event log CSV (default: <out>_events.csv)");
  init->add_option("--kill", kill, "PN to fail after assembly (repeatable)");
  init->add_option("--fault", faults, "force a POST failure, PN:BLOCK (repeatable)");

  auto* dbm = app.add_subcommand("dbm", "run the access procedure and dump DBMs and cells");
  add_common(dbm, true);
  dbm->add_option("--cells", cells_path, "cells CSV (default: <out>_cells.csv)");
  dbm->add_option("--isolation", isolation_path, "isolation CSV (default: <out>_isolation.csv)");
  dbm->add_option("--epoch", epoch, "DBM epoch stamp");

  auto* capacity = app.add_subcommand("capacity", "ergodic capacity sweep over SNR and alpha");
  add_common(capacity, true);
  capacity->add_option("--svg", svg_path, "also write an SVG chart");
  capacity->add_option("--threads", threads, "trial workers (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  auto* offload = app.add_subcommand("offload", "centralized vs distributed PGW backbone load");
  add_common(offload, true);
  offload->add_option("--flows", flows, "number of unit-volume sessions")->check(CLI::NonNegativeNumber);
  offload->add_option("--internet-fraction", internet_fraction, "share of traffic bound to the internet");
  offload->add_option("--mode", mode, "centralized|distributed");
  offload->add_option("--depth", depth, "hops from the leaves to the root")->check(CLI::NonNegativeNumber);
  offload->add_option("--branching", branching, "children per VN")->check(CLI::PositiveNumber);

  auto* squ = app.add_subcommand("squ", "price SQU metric vectors");
  add_common(squ, false);
  squ->add_option("--in", input_path,
                  "CSV: flow_id,data_urgency,energy_cost,distance_to_destination,signaling_cost,content_quality")
      ->required();
  squ->add_option("--w-urgency", w_urgency);
  squ->add_option("--w-energy", w_energy);
  squ->add_option("--w-distance", w_distance);
  squ->add_option("--w-signaling", w_signaling);
  squ->add_option("--w-quality", w_quality);

  auto* calibrate = app.add_subcommand("calibrate", "bisect alpha to hit a capacity target");
  add_common(calibrate, true);
  calibrate->add_option("--snr-db", snr_db);
  calibrate->add_option("--target", target, "bps/Hz");
  calibrate->add_option("--threads", threads)->check(CLI::PositiveNumber);

  auto* rerun = app.add_subcommand("rerun", "reproduce a run from its manifest");
  rerun->add_option("--manifest", manifest_path)->required();
  rerun->add_option("--out", out_path)->required();
  rerun->add_option("--svg", svg_path);
  rerun->add_option("--threads", threads)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    std::cerr << out.str() << err.str();
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    Invocation inv;
    if (chosen == rerun) {
      inv = from_manifest(manifest_path);
      if (inv.options.contains("threads")) inv.options["threads"] = threads;
    } else {
      inv.subcommand = chosen->get_name();
      if (!config_path.empty()) {
        const auto loaded = load_config(config_path);
        inv.config = loaded.config;
        if (!seed && !loaded.seed_present) {
          throw ConfigError("no seed: set \"seed\" in the config or pass --seed");
        }
      } else if (!seed && inv.subcommand != "squ") {
        throw ConfigError("no seed: pass --seed");
      }
      if (seed) inv.config.seed = *seed;

      auto& o = inv.options;
      if (inv.subcommand == "init") {
        o["kill"] = kill;
        json fs_json = json::array();
        for (const auto& f : faults) {
          const auto colon = f.find(':');
          int pn = 0, block = 0;
          const char* end = f.data() + f.size();
          const auto a = std::from_chars(f.data(), f.data() + (colon == std::string::npos ? 0 : colon), pn);
          const auto b = colon == std::string::npos ? a : std::from_chars(f.data() + colon + 1, end, block);
          if (colon == std::string::npos || a.ec != std::errc() || b.ec != std::errc() || b.ptr != end) {
            throw ConfigError("--fault expects PN:BLOCK, got '" + f + "'");
          }
          fs_json.push_back({pn, block});
        }
        o["faults"] = fs_json;
      } else if (inv.subcommand == "dbm") {
        o["epoch"] = epoch;
      } else if (inv.subcommand == "capacity") {
        o["threads"] = threads;
      } else if (inv.subcommand == "offload") {
        o["flows"] = flows;
        o["internet_fraction"] = internet_fraction.value_or(inv.config.internet_fraction);
        o["mode"] = mode;
        o["depth"] = depth;
        o["branching"] = branching;
      } else if (inv.subcommand == "squ") {
        o["input"] = input_path;
        o["w_urgency"] = w_urgency;
        o["w_energy"] = w_energy;
        o["w_distance"] = w_distance;
        o["w_signaling"] = w_signaling;
        o["w_quality"] = w_quality;
      } else if (inv.subcommand == "calibrate") {
        o["threads"] = threads;
        o["snr_db"] = snr_db;
        o["target"] = target;
      }
    }
    inv.out = out_path.empty() ? fs::path(inv.subcommand + (inv.subcommand == "calibrate" ? ".json" : ".csv"))
                               : fs::path(out_path);
    fill_paths(inv, {{"events", events_path},
                     {"cells", cells_path},
                     {"isolation", isolation_path},
                     {"svg", svg_path}});
    execute(inv);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::InvalidConfig ? kExitConfigError : kExitRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace smmimo
