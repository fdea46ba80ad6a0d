#include "comtdp/policy.hpp"

#include <algorithm>

#include "comtdp/evaluate.hpp"

namespace comtdp {

GoalSet makeGoal(const Model& m, std::string name,
                 const std::function<bool(StateId)>& predicate) {
  GoalSet g;
  g.name = std::move(name);
  g.member.resize(m.stateCount());
  for (StateId s = 0; s < m.stateCount(); ++s) g.member[s] = predicate(s) ? 1 : 0;
  return g;
}

namespace {

class SilentPolicy : public CommPolicy {
 public:
  MessageId chooseMessage(const EvalContext&, AgentId, BeliefId) const override {
    return kNullMessage;
  }
};

class JenningsPolicy : public CommPolicy {
 public:
  JenningsPolicy(GoalSet goal, std::vector<MessageId> sigmaPerAgent)
      : goal_(std::move(goal)), sigma_(std::move(sigmaPerAgent)) {}

  MessageId chooseMessage(const EvalContext& ctx, AgentId agent,
                          BeliefId belief) const override {
    if (sigma_[agent] == kNullMessage) return kNullMessage;
    return ctx.firstKnowsGoal(belief, goal_) ? sigma_[agent] : kNullMessage;
  }

 private:
  GoalSet goal_;
  std::vector<MessageId> sigma_;  // kNullMessage where the alphabet lacks sigmaG
};

class OverridePolicy : public CommPolicy {
 public:
  OverridePolicy(CommPolicyPtr base,
                 std::map<std::pair<AgentId, BeliefId>, MessageId> overrides)
      : base_(std::move(base)), overrides_(std::move(overrides)) {}

  MessageId chooseMessage(const EvalContext& ctx, AgentId agent,
                          BeliefId belief) const override {
    auto it = overrides_.find({agent, belief});
    if (it != overrides_.end()) return it->second;
    return base_->chooseMessage(ctx, agent, belief);
  }

 private:
  CommPolicyPtr base_;
  std::map<std::pair<AgentId, BeliefId>, MessageId> overrides_;
};

class FullCommPolicy : public CommPolicy {
 public:
  // obsToMessage_[agent][obs] = message id carrying that observation
  explicit FullCommPolicy(std::vector<std::vector<MessageId>> obsToMessage)
      : obsToMessage_(std::move(obsToMessage)) {}

  MessageId chooseMessage(const EvalContext& ctx, AgentId agent,
                          BeliefId belief) const override {
    ObsId o = ctx.store().lastObservation(belief);
    return obsToMessage_[agent][o];
  }

 private:
  std::vector<std::vector<MessageId>> obsToMessage_;
};

std::vector<MessageId> sigmaIds(const Model& m, const std::string& sigmaG) {
  std::vector<MessageId> ids(m.agentCount(), kNullMessage);
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    const auto& msgs = m.agents[i].messages;
    auto it = std::find(msgs.begin(), msgs.end(), sigmaG);
    if (it != msgs.end()) ids[i] = static_cast<MessageId>(it - msgs.begin()) + 1;
  }
  return ids;
}

}  // namespace

CommPolicyPtr silentPolicy() { return std::make_shared<SilentPolicy>(); }

CommPolicyPtr jenningsPolicy(const Model& m, GoalSet goal, const std::string& sigmaG) {
  return std::make_shared<JenningsPolicy>(std::move(goal), sigmaIds(m, sigmaG));
}

CommPolicyPtr steamPolicy(const Model& m, const SteamParams& params, GoalSet goal,
                          const std::string& sigmaG) {
  if (params.shouldCommunicate()) return jenningsPolicy(m, std::move(goal), sigmaG);
  return silentPolicy();
}

CommPolicyPtr fullCommPolicy(const Model& m) {
  std::vector<std::vector<MessageId>> map(m.agentCount());
  std::string missing;
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    map[i].resize(m.agents[i].observations.size(), kNullMessage);
    for (ObsId o = 0; o < static_cast<ObsId>(m.agents[i].observations.size()); ++o) {
      const auto& name = m.agents[i].observations[o];
      const auto& msgs = m.agents[i].messages;
      auto it = std::find(msgs.begin(), msgs.end(), name);
      if (it == msgs.end()) {
        missing += " " + m.agents[i].name + ":" + name;
      } else {
        map[i][o] = static_cast<MessageId>(it - msgs.begin()) + 1;
      }
    }
  }
  if (!missing.empty()) {
    throw ContractError(
        "fullCommPolicy: message alphabets cannot carry these observations:" + missing);
  }
  return std::make_shared<FullCommPolicy>(std::move(map));
}

CommPolicyPtr overrideAt(CommPolicyPtr base, AgentId agent, BeliefId belief, MessageId msg) {
  std::map<std::pair<AgentId, BeliefId>, MessageId> one;
  one[{agent, belief}] = msg;
  return std::make_shared<OverridePolicy>(std::move(base), std::move(one));
}

CommPolicyPtr overrideMany(CommPolicyPtr base,
                           std::map<std::pair<AgentId, BeliefId>, MessageId> overrides) {
  return std::make_shared<OverridePolicy>(std::move(base), std::move(overrides));
}

ActionId TableDomainPolicy::chooseAction(const EvalContext& ctx, AgentId agent,
                                         BeliefId belief) const {
  auto it = table_.find({agent, belief});
  if (it != table_.end()) return it->second;
  if (defaultAction_) return *defaultAction_;
  throw PolicyUndefinedError(ctx.model().agents[agent].name, ctx.store().epoch(belief),
                             ctx.store().describe(belief));
}

MessageId TableCommPolicy::chooseMessage(const EvalContext&, AgentId agent,
                                         BeliefId belief) const {
  auto it = table_.find({agent, belief});
  if (it != table_.end()) return it->second;
  return defaultMessage_;
}

}  // namespace comtdp
