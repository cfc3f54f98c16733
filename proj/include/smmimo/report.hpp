#ifndef SMMIMO_REPORT_HPP
#define SMMIMO_REPORT_HPP

#include "smmimo/accounting.hpp"
#include "smmimo/bootstrap.hpp"
#include "smmimo/capacity.hpp"
#include "smmimo/dbm.hpp"
#include "smmimo/vnode.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace smmimo {

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_number(double value);

/// Writes to a sibling temporary file and renames it into place, so readers
/// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string connection_maps_csv(const std::vector<ConnectionMap>& maps);
std::string event_log_csv(const std::vector<ControlMessage>& log);
std::string dbm_csv(const std::vector<DelayBasedMap>& dbms);
std::string cells_csv(const std::vector<VirtualCell>& cells, const std::vector<ServingSet>& serving);
std::string isolation_csv(const IsolationReport& report);
std::string capacity_csv(const CapacityCurve& curve);
std::string offload_csv(const std::vector<OffloadRow>& rows);

struct PricedFlow {
  std::string flow_id;
  double cost = 0.0;
};
std::string squ_csv(const std::vector<PricedFlow>& rows);

/// Self-contained SVG line chart: one polyline per alpha, capacity vs SNR.
std::string capacity_svg(const CapacityCurve& curve);

}  // namespace smmimo

#endif  // SMMIMO_REPORT_HPP
