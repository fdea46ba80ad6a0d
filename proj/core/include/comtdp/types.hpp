#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace comtdp {

using StateId = std::int32_t;
using AgentId = std::int32_t;
using ActionId = std::int32_t;        // per-agent action index
using JointActionId = std::int32_t;   // mixed-radix over agents
using ObsId = std::int32_t;           // per-agent observation index
using MessageId = std::int32_t;       // per-agent message; 0 is the null message
using JointMessageId = std::int32_t;  // mixed-radix over agents, null vector = 0
using BeliefId = std::int32_t;

inline constexpr MessageId kNullMessage = 0;
inline constexpr BeliefId kNoBelief = -1;

/// Thrown when a caller violates an operation's stated precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown when a policy has no output for a reachable belief.
class PolicyUndefinedError : public std::runtime_error {
 public:
  PolicyUndefinedError(std::string agent, int epoch, std::string belief)
      : std::runtime_error("policy undefined for agent '" + agent + "' at epoch " +
                           std::to_string(epoch) + ", belief " + belief),
        agent_(std::move(agent)),
        epoch_(epoch),
        belief_(std::move(belief)) {}

  const std::string& agent() const { return agent_; }
  int epoch() const { return epoch_; }
  const std::string& belief() const { return belief_; }

 private:
  std::string agent_;
  int epoch_;
  std::string belief_;
};

}  // namespace comtdp
