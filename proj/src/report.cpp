#include "smmimo/report.hpp"

#include "smmimo/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace smmimo {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(Errc::InvalidArgument, "cannot format number");
  return std::string(buf, end);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(Errc::InvalidArgument, "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string connection_maps_csv(const std::vector<ConnectionMap>& maps) {
  std::ostringstream out;
  out << "src,dst,next_hop,cost_m,generation\n";
  for (const auto& map : maps) {
    for (const auto& [dst, route] : map.routes) {
      out << map.source << ',' << dst << ',' << route.next_hop << ',' << format_number(route.cost)
          << ',' << map.generation << '\n';
    }
  }
  return out.str();
}

std::string event_log_csv(const std::vector<ControlMessage>& log) {
  std::ostringstream out;
  out << "sim_time,class,kind,src,dst\n";
  for (const auto& m : log) {
    out << m.sim_time << ',' << to_string(m.message_class) << ',' << to_string(m.kind) << ','
        << m.src << ',';
    if (m.dst == kBroadcast) out << "broadcast";
    else out << m.dst;
    out << '\n';
  }
  return out.str();
}

std::string dbm_csv(const std::vector<DelayBasedMap>& dbms) {
  std::ostringstream out;
  out << "antenna_id,ut_id,delay_distance_m,sqw,epoch\n";
  for (const auto& dbm : dbms) {
    for (const auto& [ut, e] : dbm.entries) {
      out << dbm.antenna_id << ',' << ut << ',' << format_number(e.delay_distance) << ','
          << format_number(e.sqw) << ',' << e.last_update_epoch << '\n';
    }
  }
  return out.str();
}

std::string cells_csv(const std::vector<VirtualCell>& cells, const std::vector<ServingSet>& serving) {
  std::map<int, const ServingSet*> by_ut;
  for (const auto& s : serving) by_ut[s.ut_id] = &s;
  std::ostringstream out;
  out << "vc_id,ut_id,antenna_id\n";
  for (const auto& cell : cells) {
    for (int u : cell.ut_ids) {
      auto it = by_ut.find(u);
      if (it == by_ut.end()) continue;
      for (int a : it->second->antenna_ids) out << cell.vc_id << ',' << u << ',' << a << '\n';
    }
  }
  return out.str();
}

std::string isolation_csv(const IsolationReport& report) {
  std::ostringstream out;
  out << "vc_a,vc_b,shared_antennas,cross_service\n";
  for (const auto& p : report.pairs) {
    out << p.vc_a << ',' << p.vc_b << ',' << p.shared_antennas << ',' << p.cross_service << '\n';
  }
  return out.str();
}

std::string capacity_csv(const CapacityCurve& curve) {
  std::ostringstream out;
  out << "snr_db,alpha,mu,mask_mode,capacity_bps_hz,std_error,trials,seed\n";
  for (const auto& p : curve.points) {
    out << format_number(p.snr_db) << ',' << format_number(p.alpha) << ',' << format_number(p.mu)
        << ',' << (p.mask_mode == MaskMode::Full ? "full" : "mu") << ','
        << format_number(p.mean_capacity) << ',' << format_number(p.std_error) << ',' << p.trials
        << ',' << curve.seed << '\n';
  }
  return out.str();
}

std::string offload_csv(const std::vector<OffloadRow>& rows) {
  std::ostringstream out;
  out << "mode,total_volume,backbone_volume,edge_volume,reduction_pct\n";
  for (const auto& r : rows) {
    out << (r.mode == PgwMode::Centralized ? "centralized" : "distributed") << ','
        << format_number(r.total_volume) << ',' << format_number(r.backbone_volume) << ','
        << format_number(r.edge_volume) << ',' << format_number(r.reduction_pct) << '\n';
  }
  return out.str();
}

std::string squ_csv(const std::vector<PricedFlow>& rows) {
  std::ostringstream out;
  out << "flow_id,cost_squ\n";
  for (const auto& r : rows) out << r.flow_id << ',' << format_number(r.cost) << '\n';
  return out.str();
}

std::string capacity_svg(const CapacityCurve& curve) {
  constexpr double kWidth = 720, kHeight = 480;
  constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::map<double, std::vector<const CapacityPoint*>> series;
  double x_min = INFINITY, x_max = -INFINITY, y_max = 0.0;
  for (const auto& p : curve.points) {
    series[p.alpha].push_back(&p);
    x_min = std::min(x_min, p.snr_db);
    x_max = std::max(x_max, p.snr_db);
    y_max = std::max(y_max, p.mean_capacity);
  }
  if (series.empty()) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  // Round the y range up to a 1-2-5 step.
  const double raw_step = y_max / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  const double step = raw_step / mag <= 1 ? mag : raw_step / mag <= 2 ? 2 * mag
                                                 : raw_step / mag <= 5 ? 5 * mag : 10 * mag;
  const double y_top = std::ceil(y_max / step) * step;

  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / y_top * plot_h; };

  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                        "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
         "Ergodic capacity vs SNR</text>\n";
  for (double y = 0; y <= y_top + step / 2; y += step) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << format_number(py(y)) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << format_number(py(y)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << format_number(py(y) + 4)
        << "\" text-anchor=\"end\">" << format_number(y) << "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& p : curve.points) xs.push_back(p.snr_db);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    out << "<text x=\"" << format_number(px(x)) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << format_number(x) << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">SNR (dB)</text>\n";
  out << "<text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">Capacity (bps/Hz)</text>\n";

  std::size_t index = 0;
  for (const auto& [alpha, points] : series) {
    const char* color = kColors[index % std::size(kColors)];
    auto sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const CapacityPoint* a, const CapacityPoint* b) { return a->snr_db < b->snr_db; });
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto* p : sorted) {
      out << format_number(px(p->snr_db)) << ',' << format_number(py(p->mean_capacity)) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 20 + 20 * static_cast<double>(index);
    out << "<line x1=\"" << kLeft + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + plot_w + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 46 << "\" y=\"" << ly + 4 << "\">alpha=" << format_number(alpha)
        << "</text>\n";
    ++index;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace smmimo
