#ifndef RAVEN_EVAL_POLICY_HPP
#define RAVEN_EVAL_POLICY_HPP

#include "raven/behavior/behavior.hpp"

#include <optional>
#include <string>
#include <vector>

namespace raven {

enum class PolicyKind { Raven, VoxelOnly, RayOnly, VoxelRayNoAux, Frontier3D, Vlfm3D };

std::string to_string(PolicyKind p);
std::optional<PolicyKind> policy_from_string(const std::string& name);
const std::vector<PolicyKind>& all_policies();
/// "Raven, VoxelOnly, ..." for diagnostics.
std::string policy_names();

BranchSet branches_for(PolicyKind p);

}  // namespace raven

#endif  // RAVEN_EVAL_POLICY_HPP
