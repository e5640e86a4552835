#include "raven/eval/policy.hpp"

namespace raven {

std::string to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::Raven: return "Raven";
    case PolicyKind::VoxelOnly: return "VoxelOnly";
    case PolicyKind::RayOnly: return "RayOnly";
    case PolicyKind::VoxelRayNoAux: return "VoxelRayNoAux";
    case PolicyKind::Frontier3D: return "Frontier3D";
    case PolicyKind::Vlfm3D: return "Vlfm3D";
  }
  return "?";
}

const std::vector<PolicyKind>& all_policies() {
  static const std::vector<PolicyKind> kAll = {PolicyKind::Raven,         PolicyKind::VoxelOnly,
                                               PolicyKind::RayOnly,       PolicyKind::VoxelRayNoAux,
                                               PolicyKind::Frontier3D,    PolicyKind::Vlfm3D};
  return kAll;
}

std::optional<PolicyKind> policy_from_string(const std::string& name) {
  for (PolicyKind p : all_policies())
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::string policy_names() {
  std::string out;
  for (PolicyKind p : all_policies()) out += (out.empty() ? "" : ", ") + to_string(p);
  return out;
}

BranchSet branches_for(PolicyKind p) {
  switch (p) {
    case PolicyKind::Raven: return {true, true, true, true, false};
    case PolicyKind::VoxelOnly: return {true, false, false, true, false};
    case PolicyKind::RayOnly: return {false, true, true, true, false};
    case PolicyKind::VoxelRayNoAux: return {true, true, false, true, false};
    case PolicyKind::Frontier3D: return {false, false, false, true, false};
    case PolicyKind::Vlfm3D: return {false, false, false, true, true};
  }
  return {};
}

}  // namespace raven
