#pragma once

#include <string>

#include "json.hpp"
#include "rdsec/codesim.hpp"
#include "rdsec/prob.hpp"
#include "rdsec/region.hpp"

namespace rdsec {

// Serialization grammar (documented with the CLI): a Pmf is an array of
// numbers, a Channel an array of row arrays, a JointPmf nested arrays with one
// nesting level per coordinate, row-major (last coordinate innermost).

nlohmann::json pmf_to_json(const Pmf& p);
Pmf pmf_from_json(const nlohmann::json& j);

nlohmann::json channel_to_json(const Channel& c);
Channel channel_from_json(const nlohmann::json& j);

nlohmann::json joint_to_json(const JointPmf& j);
JointPmf joint_from_json(const nlohmann::json& j);

nlohmann::json scheme_to_json(const AuxScheme& aux);
AuxScheme scheme_from_json(const nlohmann::json& j);

nlohmann::json trial_record_to_json(const TrialRecord& r);

}  // namespace rdsec
