#ifndef SMMIMO_VNODE_HPP
#define SMMIMO_VNODE_HPP

#include "smmimo/topology.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace smmimo {

enum class ResourceClass { Antenna = 0, Compute = 1, Storage = 2 };
inline constexpr std::size_t kResourceClassCount = 3;
std::string_view to_string(ResourceClass cls);

enum class Role { VBS, VMSC, PGW, SGW, MME, HSS_CACHE };
std::string_view to_string(Role role);

/// A physical resource: antennas use their global id, compute and storage
/// units are numbered per PN from 0.
struct PhysicalResource {
  ResourceClass cls = ResourceClass::Antenna;
  int pn_id = 0;
  int resource_id = 0;
  auto operator<=>(const PhysicalResource&) const = default;
};

using VirtualResourceId = std::uint64_t;

struct ResourceRequest {
  int antennas = 0;
  int compute = 0;
  int storage = 0;
};

class ResourcePool {
 public:
  ResourcePool() = default;
  explicit ResourcePool(const Scenario& scenario);

  int total(ResourceClass cls) const { return total_[index(cls)]; }
  int free(ResourceClass cls) const { return static_cast<int>(free_[index(cls)].size()); }
  int allocated(ResourceClass cls) const { return total(cls) - free(cls); }
  bool is_free(const PhysicalResource& r) const { return free_[index(r.cls)].contains(r); }

  /// Lowest (pn_id, resource_id) first. Caller checks availability.
  std::vector<PhysicalResource> take(ResourceClass cls, int count);
  void give_back(const PhysicalResource& resource);

 private:
  static std::size_t index(ResourceClass cls) { return static_cast<std::size_t>(cls); }
  std::array<std::set<PhysicalResource>, kResourceClassCount> free_;
  std::array<int, kResourceClassCount> total_{};
};

/// Bidirectional virtual <-> physical table.
class VmuMapping {
 public:
  void bind(VirtualResourceId vid, const PhysicalResource& physical);
  void unbind(VirtualResourceId vid);

  PhysicalResource map_virtual_to_physical(VirtualResourceId vid) const;
  VirtualResourceId map_physical_to_virtual(const PhysicalResource& physical) const;

  std::size_t size() const { return forward_.size(); }
  const std::map<VirtualResourceId, PhysicalResource>& entries() const { return forward_; }
  bool is_bijective() const;

 private:
  std::map<VirtualResourceId, PhysicalResource> forward_;
  std::map<PhysicalResource, VirtualResourceId> backward_;
};

struct VnMember {
  int pn_id = 0;
  std::vector<int> block_ids;
  std::vector<int> antenna_ids;
  int compute_units = 0;
  int storage_units = 0;
  bool operator==(const VnMember&) const = default;
};

struct VirtualNode {
  int vn_id = 0;
  std::vector<VnMember> members;  ///< ascending pn_id
  std::set<Role> roles;
  std::optional<int> parent_vn;
  bool internet_attached = false;  ///< has its own path to the internet edge
  std::vector<VirtualResourceId> resources;  ///< in allocation order

  int antenna_count() const;
  std::vector<int> antenna_ids() const;
  bool operator==(const VirtualNode&) const = default;
};

/// Replaces the role set after checking that a VBS has radios and a PGW can
/// reach the internet edge (through a parent, or directly).
VirtualNode assign_roles(VirtualNode vn, const std::set<Role>& roles);

enum class LinkKind { P2P, P2MP };

struct LinkEndpoint {
  int vn_id = 0;
  std::vector<int> antenna_ids;
};

struct LinkRequest {
  LinkKind kind = LinkKind::P2P;
  LinkEndpoint a;
  LinkEndpoint b;           ///< P2P only
  std::vector<int> ut_ids;  ///< P2MP only
};

struct VirtualLink {
  int link_id = 0;
  LinkKind kind = LinkKind::P2P;
  LinkEndpoint endpoint_a;
  LinkEndpoint endpoint_b;
  std::vector<int> ut_ids;
  int capacity_units = 0;  ///< min of the two endpoint sizes
};

/// Single owner of the resource pool, the VMU table, the VN hierarchy and
/// the virtual links.
class Orchestrator {
 public:
  explicit Orchestrator(const Scenario& scenario);

  struct Formed {
    VirtualNode node;
    VmuMapping mapping;  ///< this VN's slice of the VMU table
  };

  /// Greedy lowest-id allocation; all-or-nothing on InsufficientResources.
  Formed form_virtual_node(const ResourceRequest& request, bool internet_attached = false);
  void release_virtual_node(int vn_id);

  const VirtualNode& node(int vn_id) const;
  std::vector<int> vn_ids() const;
  const ResourcePool& pool() const { return pool_; }
  const VmuMapping& vmu() const { return vmu_; }

  PhysicalResource map_virtual_to_physical(VirtualResourceId vid) const {
    return vmu_.map_virtual_to_physical(vid);
  }
  VirtualResourceId map_physical_to_virtual(const PhysicalResource& r) const {
    return vmu_.map_physical_to_virtual(r);
  }

  /// Rejects parents that would close a cycle.
  void set_parent(int vn_id, std::optional<int> parent);
  const VirtualNode& assign_roles(int vn_id, const std::set<Role>& roles);

  /// UTs currently served by the VN's virtual cell.
  void attach_cell(int vn_id, std::vector<int> ut_ids);

  VirtualLink create_link(const LinkRequest& request);
  void release_link(int link_id);
  const std::map<int, VirtualLink>& links() const { return links_; }

 private:
  VirtualNode& mutable_node(int vn_id);
  int block_of(const PhysicalResource& r) const;

  ResourcePool pool_;
  VmuMapping vmu_;
  std::map<int, VirtualNode> nodes_;
  std::map<int, std::set<int>> cells_;
  std::map<int, VirtualLink> links_;
  std::set<int> busy_antennas_;
  std::vector<int> antenna_block_;                   ///< by antenna id
  std::vector<std::vector<int>> compute_block_;      ///< [pn][unit]
  std::vector<std::vector<int>> storage_block_;      ///< [pn][unit]
  int next_vn_id_ = 0;
  int next_link_id_ = 0;
  VirtualResourceId next_vid_ = 0;
};

// ---------------------------------------------------------------------------
// Gateways and traffic
// ---------------------------------------------------------------------------

/// parent[v] is v's parent VN, or empty for a root.
struct VnHierarchy {
  std::vector<std::optional<int>> parent;

  int size() const { return static_cast<int>(parent.size()); }
  int depth(int vn) const;
  std::vector<int> leaves() const;
  /// Throws InvalidArgument on out-of-range parents or cycles.
  void validate() const;
};

/// Complete tree with `depth` levels of edges below the root (vn 0), vn ids
/// assigned breadth-first.
VnHierarchy complete_tree(int depth, int branching);

enum class PgwMode { Centralized, Distributed };
enum class FlowDestination { Internet, Internal };

struct TrafficFlow {
  int flow_id = 0;
  int src_ut = 0;
  FlowDestination dst_kind = FlowDestination::Internet;
  int dst_vn = -1;  ///< Internal only
  double volume = 0.0;
};

struct FlowRoute {
  int flow_id = 0;
  int src_vn = 0;
  int exit_vn = 0;  ///< PGW for internet flows, destination VN otherwise
  int hops = 0;
  double volume = 0.0;
  FlowDestination dst_kind = FlowDestination::Internet;
};

struct LoadReport {
  double total_volume = 0.0;
  double backbone_volume = 0.0;  ///< sum of volume x hops, all flows
  double internet_backbone_volume = 0.0;
  double internal_backbone_volume = 0.0;
  double edge_volume = 0.0;  ///< internet volume handed to a gateway
  std::map<std::pair<int, int>, double> link_volumes;  ///< (child, parent) -> volume
  std::vector<FlowRoute> routes;                       ///< in input order

  const FlowRoute* route_of(int flow_id) const;
};

/// Internet flows leave at the nearest ancestor-or-self holding a PGW;
/// internal flows climb to the lowest common ancestor and descend.
/// `ut_vn[u]` is the VN serving UT u. Throws NoRoute.
LoadReport route_traffic(std::span<const TrafficFlow> flows, const VnHierarchy& hierarchy,
                         std::span<const int> ut_vn, const std::vector<bool>& has_pgw);

/// Centralized: only roots hold a PGW. Distributed: every VN does.
LoadReport route_traffic(std::span<const TrafficFlow> flows, const VnHierarchy& hierarchy,
                         std::span<const int> ut_vn, PgwMode mode);

struct OffloadSpec {
  int flows = 100;
  double internet_fraction = 0.75;
  int depth = 2;
  int branching = 2;
  std::uint64_t seed = 1;
  PgwMode mode = PgwMode::Distributed;
};

struct OffloadRow {
  PgwMode mode = PgwMode::Distributed;
  double total_volume = 0.0;
  double backbone_volume = 0.0;
  double internet_backbone_volume = 0.0;
  double edge_volume = 0.0;
  double reduction_pct = 0.0;  ///< backbone saving relative to Centralized
};

/// Unit-volume sessions from seeded leaves of a complete tree, each split
/// into an internet part (internet_fraction) and an internal part to another
/// seeded VN.
std::vector<TrafficFlow> offload_flows(const OffloadSpec& spec, const VnHierarchy& tree,
                                       std::vector<int>& ut_vn);
OffloadRow offload_experiment(const OffloadSpec& spec);

}  // namespace smmimo

#endif  // SMMIMO_VNODE_HPP
