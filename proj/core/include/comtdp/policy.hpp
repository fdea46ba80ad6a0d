#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "comtdp/belief.hpp"
#include "comtdp/model.hpp"
#include "comtdp/types.hpp"

namespace comtdp {

class EvalContext;

/// A subset of world states (a joint goal, e.g. "the radar is destroyed").
struct GoalSet {
  std::string name;
  std::vector<std::uint8_t> member;  // indexed by StateId

  bool contains(StateId s) const { return member[s] != 0; }
  bool containsAll(const std::vector<StateId>& states) const {
    for (StateId s : states) {
      if (!member[s]) return false;
    }
    return !states.empty();
  }
};

GoalSet makeGoal(const Model& m, std::string name,
                 const std::function<bool(StateId)>& predicate);

/// Deterministic mapping from post-communication beliefs to actions.
/// Implementations must be pure: equal beliefs always map to equal actions.
class DomainPolicy {
 public:
  virtual ~DomainPolicy() = default;
  virtual ActionId chooseAction(const EvalContext& ctx, AgentId agent,
                                BeliefId postCommBelief) const = 0;
};

/// Deterministic mapping from pre-communication beliefs to messages
/// (kNullMessage for silence).
class CommPolicy {
 public:
  virtual ~CommPolicy() = default;
  virtual MessageId chooseMessage(const EvalContext& ctx, AgentId agent,
                                  BeliefId preCommBelief) const = 0;
};

using DomainPolicyPtr = std::shared_ptr<const DomainPolicy>;
using CommPolicyPtr = std::shared_ptr<const CommPolicy>;

/// STEAM-style communication selectivity parameters: probability and cost
/// of miscoordinated termination, and the cost of sending.
struct SteamParams {
  double tau = 0.0;  // in [0, 1]
  double cMt = 0.0;  // >= 0
  double cC = 0.0;   // >= 0

  /// The published criterion, strict exactly as printed; ties fall to
  /// silence.
  bool shouldCommunicate() const { return tau * cMt > cC; }
};

// ---- policy constructors -----------------------------------------------

/// Every belief maps to the null message.
CommPolicyPtr silentPolicy();

/// Announce the goal's achievement exactly once: emit `sigmaG` from the
/// first belief whose consistent-state set lies inside the goal (and whose
/// one-step-shorter prefix's does not), null otherwise. Agents whose
/// alphabet lacks `sigmaG` stay silent.
CommPolicyPtr jenningsPolicy(const Model& m, GoalSet goal, const std::string& sigmaG);

/// jenningsPolicy when params.shouldCommunicate(), else silentPolicy.
CommPolicyPtr steamPolicy(const Model& m, const SteamParams& params, GoalSet goal,
                          const std::string& sigmaG);

/// Each agent retransmits its latest observation verbatim every epoch.
/// Requires every agent's message alphabet to contain a symbol for each of
/// its observations; throws ContractError naming the missing symbols.
CommPolicyPtr fullCommPolicy(const Model& m);

/// Identical to `base` except at (agent, belief), where it returns `msg`.
CommPolicyPtr overrideAt(CommPolicyPtr base, AgentId agent, BeliefId belief, MessageId msg);

/// Composite override: `base` with a table of (agent, belief) -> message
/// replacements. Used by the optimal-communication search.
CommPolicyPtr overrideMany(CommPolicyPtr base,
                           std::map<std::pair<AgentId, BeliefId>, MessageId> overrides);

// ---- table policies (explicit finite maps, mostly for small instances) --

class TableDomainPolicy : public DomainPolicy {
 public:
  explicit TableDomainPolicy(std::optional<ActionId> defaultAction = std::nullopt)
      : defaultAction_(defaultAction) {}

  void set(AgentId agent, BeliefId belief, ActionId action) {
    table_[{agent, belief}] = action;
  }

  ActionId chooseAction(const EvalContext&, AgentId agent, BeliefId belief) const override;

 private:
  std::map<std::pair<AgentId, BeliefId>, ActionId> table_;
  std::optional<ActionId> defaultAction_;
};

class TableCommPolicy : public CommPolicy {
 public:
  explicit TableCommPolicy(MessageId defaultMessage = kNullMessage)
      : defaultMessage_(defaultMessage) {}

  void set(AgentId agent, BeliefId belief, MessageId msg) { table_[{agent, belief}] = msg; }

  MessageId chooseMessage(const EvalContext&, AgentId agent, BeliefId belief) const override;

 private:
  std::map<std::pair<AgentId, BeliefId>, MessageId> table_;
  MessageId defaultMessage_;
};

/// Domain policy defined by a plain function (no context access).
class LambdaDomainPolicy : public DomainPolicy {
 public:
  using Fn = std::function<ActionId(AgentId, BeliefId)>;
  explicit LambdaDomainPolicy(Fn fn) : fn_(std::move(fn)) {}
  ActionId chooseAction(const EvalContext&, AgentId agent, BeliefId belief) const override {
    return fn_(agent, belief);
  }

 private:
  Fn fn_;
};

}  // namespace comtdp
