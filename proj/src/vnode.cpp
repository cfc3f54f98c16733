#include "smmimo/vnode.hpp"

#include "smmimo/error.hpp"
#include "smmimo/random.hpp"

#include <algorithm>
#include <string>

namespace smmimo {

std::string_view to_string(ResourceClass cls) {
  switch (cls) {
    case ResourceClass::Antenna: return "antenna";
    case ResourceClass::Compute: return "compute";
    case ResourceClass::Storage: return "storage";
  }
  return "?";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::VBS: return "VBS";
    case Role::VMSC: return "VMSC";
    case Role::PGW: return "PGW";
    case Role::SGW: return "SGW";
    case Role::MME: return "MME";
    case Role::HSS_CACHE: return "HSS_CACHE";
  }
  return "?";
}

// --- ResourcePool -----------------------------------------------------------

ResourcePool::ResourcePool(const Scenario& scenario) {
  for (const auto& a : scenario.antennas) {
    free_[index(ResourceClass::Antenna)].insert({ResourceClass::Antenna, a.pn_id, a.id});
  }
  for (const auto& pn : scenario.nodes) {
    for (int u = 0; u < pn.total_compute_units(); ++u) {
      free_[index(ResourceClass::Compute)].insert({ResourceClass::Compute, pn.id, u});
    }
    for (int u = 0; u < pn.total_storage_units(); ++u) {
      free_[index(ResourceClass::Storage)].insert({ResourceClass::Storage, pn.id, u});
    }
  }
  for (std::size_t c = 0; c < kResourceClassCount; ++c) total_[c] = static_cast<int>(free_[c].size());
}

std::vector<PhysicalResource> ResourcePool::take(ResourceClass cls, int count) {
  auto& bucket = free_[index(cls)];
  if (count < 0 || count > static_cast<int>(bucket.size())) {
    throw Error(Errc::InsufficientResources, std::string(to_string(cls)));
  }
  std::vector<PhysicalResource> out(bucket.begin(), std::next(bucket.begin(), count));
  bucket.erase(bucket.begin(), std::next(bucket.begin(), count));
  return out;
}

void ResourcePool::give_back(const PhysicalResource& resource) {
  if (!free_[index(resource.cls)].insert(resource).second) {
    throw Error(Errc::InvalidArgument, "resource returned twice");
  }
}

// --- VmuMapping -------------------------------------------------------------

void VmuMapping::bind(VirtualResourceId vid, const PhysicalResource& physical) {
  if (forward_.contains(vid) || backward_.contains(physical)) {
    throw Error(Errc::InvalidArgument, "VMU binding would break bijectivity");
  }
  forward_.emplace(vid, physical);
  backward_.emplace(physical, vid);
}

void VmuMapping::unbind(VirtualResourceId vid) {
  auto it = forward_.find(vid);
  if (it == forward_.end()) throw Error(Errc::UnknownResource, "virtual id " + std::to_string(vid));
  backward_.erase(it->second);
  forward_.erase(it);
}

PhysicalResource VmuMapping::map_virtual_to_physical(VirtualResourceId vid) const {
  auto it = forward_.find(vid);
  if (it == forward_.end()) throw Error(Errc::UnknownResource, "virtual id " + std::to_string(vid));
  return it->second;
}

VirtualResourceId VmuMapping::map_physical_to_virtual(const PhysicalResource& physical) const {
  auto it = backward_.find(physical);
  if (it == backward_.end()) {
    throw Error(Errc::UnknownResource, std::string(to_string(physical.cls)) + " " +
                                           std::to_string(physical.pn_id) + "/" +
                                           std::to_string(physical.resource_id));
  }
  return it->second;
}

bool VmuMapping::is_bijective() const {
  if (forward_.size() != backward_.size()) return false;
  for (const auto& [vid, phys] : forward_) {
    auto it = backward_.find(phys);
    if (it == backward_.end() || it->second != vid) return false;
  }
  return true;
}

// --- VirtualNode --------------------------------------------------------------

int VirtualNode::antenna_count() const {
  int n = 0;
  for (const auto& m : members) n += static_cast<int>(m.antenna_ids.size());
  return n;
}

std::vector<int> VirtualNode::antenna_ids() const {
  std::vector<int> out;
  for (const auto& m : members) out.insert(out.end(), m.antenna_ids.begin(), m.antenna_ids.end());
  return out;
}

VirtualNode assign_roles(VirtualNode vn, const std::set<Role>& roles) {
  if (roles.contains(Role::VBS) && vn.antenna_count() == 0) {
    throw Error(Errc::RoleConstraintViolated, "VBS requires at least one antenna");
  }
  if (roles.contains(Role::PGW) && !vn.parent_vn && !vn.internet_attached) {
    throw Error(Errc::RoleConstraintViolated,
                "PGW requires a parent VN or a direct internet attachment");
  }
  vn.roles = roles;
  return vn;
}

// --- Orchestrator -------------------------------------------------------------

Orchestrator::Orchestrator(const Scenario& scenario) : pool_(scenario) {
  antenna_block_.resize(scenario.antennas.size());
  for (const auto& a : scenario.antennas) antenna_block_[a.id] = a.block_id;
  for (const auto& pn : scenario.nodes) {
    std::vector<int> compute, storage;
    for (const auto& b : pn.blocks) {
      compute.insert(compute.end(), b.compute_units, b.id);
      storage.insert(storage.end(), b.storage_units, b.id);
    }
    compute_block_.push_back(std::move(compute));
    storage_block_.push_back(std::move(storage));
  }
}

int Orchestrator::block_of(const PhysicalResource& r) const {
  switch (r.cls) {
    case ResourceClass::Antenna: return antenna_block_.at(r.resource_id);
    case ResourceClass::Compute: return compute_block_.at(r.pn_id).at(r.resource_id);
    case ResourceClass::Storage: return storage_block_.at(r.pn_id).at(r.resource_id);
  }
  return 0;
}

Orchestrator::Formed Orchestrator::form_virtual_node(const ResourceRequest& request,
                                                     bool internet_attached) {
  const std::array<std::pair<ResourceClass, int>, kResourceClassCount> wanted{{
      {ResourceClass::Antenna, request.antennas},
      {ResourceClass::Compute, request.compute},
      {ResourceClass::Storage, request.storage},
  }};
  for (const auto& [cls, count] : wanted) {
    if (count < 0) throw Error(Errc::InvalidArgument, "negative resource request");
    if (count > pool_.free(cls)) {
      throw Error(Errc::InsufficientResources,
                  std::string(to_string(cls)) + ": requested " + std::to_string(count) +
                      ", free " + std::to_string(pool_.free(cls)));
    }
  }
  if (request.antennas + request.compute + request.storage == 0) {
    throw Error(Errc::InvalidArgument, "a virtual node needs at least one resource");
  }

  VirtualNode vn;
  vn.vn_id = next_vn_id_++;
  vn.internet_attached = internet_attached;
  Formed formed;
  std::map<int, VnMember> members;
  std::map<int, std::set<int>> blocks;
  for (const auto& [cls, count] : wanted) {
    for (const auto& r : pool_.take(cls, count)) {
      const VirtualResourceId vid = next_vid_++;
      vmu_.bind(vid, r);
      formed.mapping.bind(vid, r);
      vn.resources.push_back(vid);
      auto& m = members[r.pn_id];
      m.pn_id = r.pn_id;
      blocks[r.pn_id].insert(block_of(r));
      if (cls == ResourceClass::Antenna) m.antenna_ids.push_back(r.resource_id);
      else if (cls == ResourceClass::Compute) ++m.compute_units;
      else ++m.storage_units;
    }
  }
  for (auto& [pn, m] : members) {
    m.block_ids.assign(blocks[pn].begin(), blocks[pn].end());
    vn.members.push_back(std::move(m));
  }
  nodes_.emplace(vn.vn_id, vn);
  formed.node = std::move(vn);
  return formed;
}

void Orchestrator::release_virtual_node(int vn_id) {
  VirtualNode vn = mutable_node(vn_id);
  std::vector<int> doomed;
  for (const auto& [id, link] : links_) {
    if (link.endpoint_a.vn_id == vn_id || (link.kind == LinkKind::P2P && link.endpoint_b.vn_id == vn_id)) {
      doomed.push_back(id);
    }
  }
  for (int id : doomed) release_link(id);
  for (VirtualResourceId vid : vn.resources) {
    pool_.give_back(vmu_.map_virtual_to_physical(vid));
    vmu_.unbind(vid);
  }
  for (auto& [id, other] : nodes_) {
    if (other.parent_vn == vn_id) other.parent_vn.reset();
  }
  cells_.erase(vn_id);
  nodes_.erase(vn_id);
}

VirtualNode& Orchestrator::mutable_node(int vn_id) {
  auto it = nodes_.find(vn_id);
  if (it == nodes_.end()) throw Error(Errc::InvalidArgument, "unknown VN " + std::to_string(vn_id));
  return it->second;
}

const VirtualNode& Orchestrator::node(int vn_id) const {
  auto it = nodes_.find(vn_id);
  if (it == nodes_.end()) throw Error(Errc::InvalidArgument, "unknown VN " + std::to_string(vn_id));
  return it->second;
}

std::vector<int> Orchestrator::vn_ids() const {
  std::vector<int> ids;
  for (const auto& [id, vn] : nodes_) ids.push_back(id);
  return ids;
}

void Orchestrator::set_parent(int vn_id, std::optional<int> parent) {
  auto& vn = mutable_node(vn_id);
  if (parent) {
    node(*parent);
    for (std::optional<int> cur = parent; cur; cur = node(*cur).parent_vn) {
      if (*cur == vn_id) throw Error(Errc::InvalidArgument, "parent would create a cycle");
    }
  }
  if (!parent && vn.roles.contains(Role::PGW) && !vn.internet_attached) {
    throw Error(Errc::RoleConstraintViolated, "detaching would strand this VN's PGW");
  }
  vn.parent_vn = parent;
}

const VirtualNode& Orchestrator::assign_roles(int vn_id, const std::set<Role>& roles) {
  auto& vn = mutable_node(vn_id);
  vn = smmimo::assign_roles(vn, roles);
  return vn;
}

void Orchestrator::attach_cell(int vn_id, std::vector<int> ut_ids) {
  mutable_node(vn_id);
  cells_[vn_id] = std::set<int>(ut_ids.begin(), ut_ids.end());
}

VirtualLink Orchestrator::create_link(const LinkRequest& request) {
  auto check_endpoint = [this](const LinkEndpoint& ep) {
    const auto& vn = node(ep.vn_id);
    if (ep.antenna_ids.empty()) throw Error(Errc::InvalidArgument, "link endpoint without antennas");
    const auto owned = vn.antenna_ids();
    const std::set<int> own(owned.begin(), owned.end());
    std::set<int> seen;
    for (int a : ep.antenna_ids) {
      if (!own.contains(a)) {
        throw Error(Errc::InvalidArgument,
                    "antenna " + std::to_string(a) + " is not a member of VN " + std::to_string(ep.vn_id));
      }
      if (!seen.insert(a).second) throw Error(Errc::InvalidArgument, "duplicate antenna in endpoint");
      if (busy_antennas_.contains(a)) {
        throw Error(Errc::AntennaBusy, "antenna " + std::to_string(a) + " already carries a link");
      }
    }
  };

  VirtualLink link;
  link.kind = request.kind;
  link.endpoint_a = request.a;
  check_endpoint(request.a);
  if (request.kind == LinkKind::P2P) {
    if (request.a.vn_id == request.b.vn_id) {
      throw Error(Errc::InvalidArgument, "P2P endpoints must be distinct VNs");
    }
    check_endpoint(request.b);
    link.endpoint_b = request.b;
    link.capacity_units = static_cast<int>(std::min(request.a.antenna_ids.size(), request.b.antenna_ids.size()));
  } else {
    if (request.ut_ids.empty()) throw Error(Errc::InvalidArgument, "P2MP link without UTs");
    const auto cell = cells_.find(request.a.vn_id);
    for (int u : request.ut_ids) {
      if (cell == cells_.end() || !cell->second.contains(u)) {
        throw Error(Errc::ForeignUt, "UT " + std::to_string(u) + " is outside VN " +
                                         std::to_string(request.a.vn_id) + "'s cell");
      }
    }
    link.ut_ids = request.ut_ids;
    link.capacity_units = static_cast<int>(std::min(request.a.antenna_ids.size(), request.ut_ids.size()));
  }
  link.link_id = next_link_id_++;
  busy_antennas_.insert(link.endpoint_a.antenna_ids.begin(), link.endpoint_a.antenna_ids.end());
  busy_antennas_.insert(link.endpoint_b.antenna_ids.begin(), link.endpoint_b.antenna_ids.end());
  links_.emplace(link.link_id, link);
  return link;
}

void Orchestrator::release_link(int link_id) {
  auto it = links_.find(link_id);
  if (it == links_.end()) throw Error(Errc::InvalidArgument, "unknown link " + std::to_string(link_id));
  for (int a : it->second.endpoint_a.antenna_ids) busy_antennas_.erase(a);
  for (int a : it->second.endpoint_b.antenna_ids) busy_antennas_.erase(a);
  links_.erase(it);
}

// --- Hierarchy and routing ----------------------------------------------------

int VnHierarchy::depth(int vn) const {
  int d = 0;
  for (auto p = parent.at(vn); p; p = parent.at(*p)) ++d;
  return d;
}

std::vector<int> VnHierarchy::leaves() const {
  std::vector<bool> has_child(parent.size(), false);
  for (const auto& p : parent) {
    if (p) has_child[*p] = true;
  }
  std::vector<int> out;
  for (int v = 0; v < size(); ++v) {
    if (!has_child[v]) out.push_back(v);
  }
  return out;
}

void VnHierarchy::validate() const {
  for (int v = 0; v < size(); ++v) {
    int steps = 0;
    for (auto p = parent[v]; p; p = parent[*p]) {
      if (*p < 0 || *p >= size()) throw Error(Errc::InvalidArgument, "parent out of range");
      if (++steps > size()) throw Error(Errc::InvalidArgument, "hierarchy contains a cycle");
    }
  }
}

VnHierarchy complete_tree(int depth, int branching) {
  if (depth < 0 || branching < 1) throw Error(Errc::InvalidArgument, "bad tree shape");
  VnHierarchy h;
  h.parent.push_back(std::nullopt);
  std::vector<int> level{0};
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    for (int p : level) {
      for (int b = 0; b < branching; ++b) {
        next.push_back(h.size());
        h.parent.emplace_back(p);
      }
    }
    level = std::move(next);
  }
  return h;
}

const FlowRoute* LoadReport::route_of(int flow_id) const {
  for (const auto& r : routes) {
    if (r.flow_id == flow_id) return &r;
  }
  return nullptr;
}

LoadReport route_traffic(std::span<const TrafficFlow> flows, const VnHierarchy& hierarchy,
                         std::span<const int> ut_vn, const std::vector<bool>& has_pgw) {
  hierarchy.validate();
  if (static_cast<int>(has_pgw.size()) != hierarchy.size()) {
    throw Error(Errc::InvalidArgument, "one PGW flag per VN required");
  }
  LoadReport report;
  auto climb = [&](int from, int to, double volume) {
    for (int v = from; v != to; v = *hierarchy.parent[v]) {
      report.link_volumes[{v, *hierarchy.parent[v]}] += volume;
    }
  };

  for (const auto& flow : flows) {
    if (flow.volume < 0.0) throw Error(Errc::InvalidArgument, "negative flow volume");
    if (flow.src_ut < 0 || flow.src_ut >= static_cast<int>(ut_vn.size())) {
      throw Error(Errc::NoRoute, "flow " + std::to_string(flow.flow_id) + ": UT has no VN");
    }
    const int src = ut_vn[flow.src_ut];
    if (src < 0 || src >= hierarchy.size()) {
      throw Error(Errc::NoRoute, "flow " + std::to_string(flow.flow_id) + ": source VN not in forest");
    }
    FlowRoute route{flow.flow_id, src, src, 0, flow.volume, flow.dst_kind};
    report.total_volume += flow.volume;

    if (flow.dst_kind == FlowDestination::Internet) {
      std::optional<int> gw = src;
      while (gw && !has_pgw[*gw]) gw = hierarchy.parent[*gw];
      if (!gw) throw Error(Errc::NoRoute, "flow " + std::to_string(flow.flow_id) + ": no PGW upstream");
      route.exit_vn = *gw;
      route.hops = hierarchy.depth(src) - hierarchy.depth(*gw);
      climb(src, *gw, flow.volume);
      report.internet_backbone_volume += flow.volume * route.hops;
      report.edge_volume += flow.volume;
    } else {
      const int dst = flow.dst_vn;
      if (dst < 0 || dst >= hierarchy.size()) {
        throw Error(Errc::NoRoute, "flow " + std::to_string(flow.flow_id) + ": destination VN not in forest");
      }
      std::set<int> src_chain;
      for (std::optional<int> v = src; v; v = hierarchy.parent[*v]) src_chain.insert(*v);
      std::optional<int> lca = dst;
      while (lca && !src_chain.contains(*lca)) lca = hierarchy.parent[*lca];
      if (!lca) throw Error(Errc::NoRoute, "flow " + std::to_string(flow.flow_id) + ": VNs in different trees");
      route.exit_vn = dst;
      route.hops = hierarchy.depth(src) + hierarchy.depth(dst) - 2 * hierarchy.depth(*lca);
      climb(src, *lca, flow.volume);
      climb(dst, *lca, flow.volume);
      report.internal_backbone_volume += flow.volume * route.hops;
    }
    report.routes.push_back(route);
  }
  report.backbone_volume = report.internet_backbone_volume + report.internal_backbone_volume;
  return report;
}

LoadReport route_traffic(std::span<const TrafficFlow> flows, const VnHierarchy& hierarchy,
                         std::span<const int> ut_vn, PgwMode mode) {
  std::vector<bool> has_pgw(hierarchy.size());
  for (int v = 0; v < hierarchy.size(); ++v) {
    has_pgw[v] = mode == PgwMode::Distributed || !hierarchy.parent[v];
  }
  return route_traffic(flows, hierarchy, ut_vn, has_pgw);
}

std::vector<TrafficFlow> offload_flows(const OffloadSpec& spec, const VnHierarchy& tree,
                                       std::vector<int>& ut_vn) {
  if (spec.flows < 0) throw Error(Errc::InvalidArgument, "flows must be >= 0");
  if (!(spec.internet_fraction >= 0.0 && spec.internet_fraction <= 1.0)) {
    throw Error(Errc::InvalidArgument, "internet fraction out of [0,1]");
  }
  CounterRng rng(spec.seed, 0x0FF10ADull);
  const auto leaves = tree.leaves();
  std::vector<TrafficFlow> flows;
  ut_vn.clear();
  for (int i = 0; i < spec.flows; ++i) {
    const int src = leaves[rng.below(leaves.size())];
    ut_vn.push_back(src);
    int dst = static_cast<int>(rng.below(static_cast<std::uint64_t>(tree.size())));
    if (tree.size() > 1 && dst == src) dst = (dst + 1) % tree.size();
    flows.push_back({2 * i, i, FlowDestination::Internet, -1, spec.internet_fraction});
    flows.push_back({2 * i + 1, i, FlowDestination::Internal, dst, 1.0 - spec.internet_fraction});
  }
  return flows;
}

OffloadRow offload_experiment(const OffloadSpec& spec) {
  const auto tree = complete_tree(spec.depth, spec.branching);
  std::vector<int> ut_vn;
  const auto flows = offload_flows(spec, tree, ut_vn);
  const auto central = route_traffic(flows, tree, ut_vn, PgwMode::Centralized);
  const auto chosen = spec.mode == PgwMode::Centralized ? central
                                                        : route_traffic(flows, tree, ut_vn, spec.mode);
  OffloadRow row;
  row.mode = spec.mode;
  row.total_volume = chosen.total_volume;
  row.backbone_volume = chosen.backbone_volume;
  row.internet_backbone_volume = chosen.internet_backbone_volume;
  row.edge_volume = chosen.edge_volume;
  row.reduction_pct = central.backbone_volume > 0.0
                          ? 100.0 * (central.backbone_volume - chosen.backbone_volume) / central.backbone_volume
                          : 0.0;
  return row;
}

}  // namespace smmimo
