#include "comtdp/reductions.hpp"

#include <algorithm>

namespace comtdp {

JointActionId DecPomdp::jointActionCount() const {
  long long n = 1;
  for (const auto& a : agents) n *= static_cast<long long>(a.actions.size());
  return static_cast<JointActionId>(n);
}

ActionId DecPolicy::action(AgentId i, const std::vector<ObsId>& history) const {
  auto it = table[i].find(history);
  if (it == table[i].end()) {
    throw PolicyUndefinedError("agent" + std::to_string(i),
                               static_cast<int>(history.size()) - 1, "obs-history");
  }
  return it->second;
}

ActionId PomdpPolicy::action(const std::vector<ObsId>& history) const {
  auto it = table.find(history);
  if (it == table.end()) {
    throw PolicyUndefinedError("pomdp-agent", static_cast<int>(history.size()) - 1,
                               "obs-history");
  }
  return it->second;
}

Model liftDecPomdp(const DecPomdp& d, int horizon) {
  Model m;
  m.features.push_back(FeatureDef{"s", d.states});
  m.agents = d.agents;
  for (auto& a : m.agents) a.messages.clear();  // no communication
  m.transition = d.transition;
  m.obsJoint = d.observation;  // bit-identical copy
  m.rewardDomain = d.reward;
  m.rewardComm.assign(d.states.size(), 0.0);  // single (all-null) message vector
  m.initial = d.initial;
  m.horizon = horizon;
  return m;
}

namespace {

class LiftedDomainPolicy : public DomainPolicy {
 public:
  LiftedDomainPolicy(DecPolicy policy) : policy_(std::move(policy)) {}

  ActionId chooseAction(const EvalContext& ctx, AgentId agent,
                        BeliefId belief) const override {
    return policy_.action(agent, ctx.store().observationHistory(belief));
  }

 private:
  DecPolicy policy_;
};

}  // namespace

DomainPolicyPtr liftedDomainPolicy(const Model&, const DecPomdp&, DecPolicy policy) {
  return std::make_shared<LiftedDomainPolicy>(std::move(policy));
}

DecPolicy lowerDomainPolicy(const Model& lifted, BeliefStore& store,
                            const DomainPolicy& policy,
                            const std::vector<std::vector<std::vector<ObsId>>>& histories) {
  EvalContext ctx(lifted, store);
  DecPolicy out;
  out.table.resize(lifted.agentCount());
  for (AgentId i = 0; i < lifted.agentCount(); ++i) {
    for (const auto& history : histories[i]) {
      BeliefId b = store.root(i);
      for (ObsId o : history) {
        b = store.withObservation(b, o);
        b = store.withMessages(b, 0);  // the only (all-null) joint message
      }
      out.table[i][history] = policy.chooseAction(ctx, i, b);
    }
  }
  return out;
}

CollapsedPomdp collapseFreeComm(const Model& m) {
  if (classifyCommunication(m) != CommCost::kFree) {
    throw ContractError("collapseFreeComm: communication is not free");
  }

  CollapsedPomdp out;
  Model& w = out.widenedModel;
  w = m;
  // Widen message alphabets so every observation can be broadcast;
  // reward-neutral because communication is free.
  for (auto& agent : w.agents) {
    for (const auto& obs : agent.observations) {
      if (std::find(agent.messages.begin(), agent.messages.end(), obs) ==
          agent.messages.end()) {
        agent.messages.push_back(obs);
      }
    }
  }
  w.rewardComm.assign(static_cast<std::size_t>(w.stateCount()) * w.jointMessageCount(), 0.0);

  const StateId nS = m.stateCount();
  const JointActionId nA = m.jointActionCount();

  Pomdp& p = out.pomdp;
  for (StateId s = 0; s < nS; ++s) p.states.push_back(m.stateName(s));
  for (JointActionId a = 0; a < nA; ++a) p.actions.push_back(m.jointActionName(a));
  p.transition = m.transition;
  p.reward = m.rewardDomain;
  p.initial = m.initial;
  p.observation.resize(static_cast<std::size_t>(nS) * (nA + 1));

  auto collapsedObs = [&](const std::vector<ObsId>& vec) {
    auto it = out.obsIndex.find(vec);
    if (it != out.obsIndex.end()) return it->second;
    ObsId id = static_cast<ObsId>(out.obsVectors.size());
    out.obsIndex.emplace(vec, id);
    out.obsVectors.push_back(vec);
    std::string name;
    for (std::size_t i = 0; i < vec.size(); ++i) {
      if (i) name += "&";
      name += m.agents[i].observations[vec[i]];
    }
    p.observations.push_back(name);
    return id;
  };

  for (StateId s = 0; s < nS; ++s) {
    for (int key = 0; key <= nA; ++key) {
      std::optional<JointActionId> prev =
          key == 0 ? std::nullopt : std::optional<JointActionId>(key - 1);
      auto& row = p.observation[m.obsKey(s, prev)];
      for (const auto& e : m.observationDistribution(s, prev)) {
        row.push_back({collapsedObs(e.obs), e.p});
      }
    }
  }
  return out;
}

namespace {

/// Reconstructs the joint observation history encoded in a belief's
/// broadcast messages (valid when paired with fullCommPolicy on a model
/// whose message alphabets carry observations).
std::vector<std::vector<ObsId>> decodeBroadcast(const Model& m, const BeliefStore& store,
                                                BeliefId belief) {
  std::vector<std::vector<ObsId>> jointHistory;
  for (JointMessageId jm : store.messageHistory(belief)) {
    std::vector<ObsId> obs(m.agentCount());
    for (AgentId j = 0; j < m.agentCount(); ++j) {
      MessageId msg = m.agentMessage(jm, j);
      if (msg == kNullMessage) {
        throw ContractError("decodeBroadcast: null message in a full-communication history");
      }
      obs[j] = m.observationIndex(j, m.agents[j].messages[msg - 1]);
    }
    jointHistory.push_back(std::move(obs));
  }
  return jointHistory;
}

class CollapsedDomainPolicy : public DomainPolicy {
 public:
  CollapsedDomainPolicy(const CollapsedPomdp& c, PomdpPolicy policy)
      : c_(&c), policy_(std::move(policy)) {}

  ActionId chooseAction(const EvalContext& ctx, AgentId agent,
                        BeliefId belief) const override {
    const Model& m = c_->widenedModel;
    std::vector<ObsId> history;
    for (const auto& joint : decodeBroadcast(m, ctx.store(), belief)) {
      history.push_back(c_->obsIndex.at(joint));
    }
    JointActionId ja = policy_.action(history);
    return m.agentAction(ja, agent);
  }

 private:
  const CollapsedPomdp* c_;
  PomdpPolicy policy_;
};

class DominanceTransformPolicy : public DomainPolicy {
 public:
  DominanceTransformPolicy(const Model& m, BeliefStore& store, DomainPolicyPtr innerDomain,
                           CommPolicyPtr innerComm)
      : model_(&m), store_(&store), innerDomain_(std::move(innerDomain)),
        innerComm_(std::move(innerComm)) {}

  ActionId chooseAction(const EvalContext& ctx, AgentId agent,
                        BeliefId belief) const override {
    const Model& m = *model_;
    // Replay the alternate pair's belief evolution over the joint
    // observation history that full communication lays bare.
    auto jointHistory = decodeBroadcast(m, ctx.store(), belief);
    std::vector<BeliefId> inner(m.agentCount());
    for (AgentId j = 0; j < m.agentCount(); ++j) inner[j] = store_->root(j);
    for (const auto& joint : jointHistory) {
      std::vector<MessageId> msgs(m.agentCount());
      for (AgentId j = 0; j < m.agentCount(); ++j) {
        inner[j] = store_->withObservation(inner[j], joint[j]);
        msgs[j] = innerComm_->chooseMessage(ctx, j, inner[j]);
      }
      JointMessageId jm = m.packMessage(msgs);
      for (AgentId j = 0; j < m.agentCount(); ++j) {
        inner[j] = store_->withMessages(inner[j], jm);
      }
    }
    return innerDomain_->chooseAction(ctx, agent, inner[agent]);
  }

 private:
  const Model* model_;
  BeliefStore* store_;
  DomainPolicyPtr innerDomain_;
  CommPolicyPtr innerComm_;
};

}  // namespace

DomainPolicyPtr collapsedDomainPolicy(const CollapsedPomdp& c, PomdpPolicy policy) {
  return std::make_shared<CollapsedDomainPolicy>(c, std::move(policy));
}

DomainPolicyPtr dominanceTransform(const Model& m, BeliefStore& store,
                                   DomainPolicyPtr innerDomain, CommPolicyPtr innerComm) {
  if (classifyCommunication(m) != CommCost::kFree) {
    throw ContractError("dominanceTransform: communication is not free");
  }
  fullCommPolicy(m);  // precondition: alphabets can carry observations
  return std::make_shared<DominanceTransformPolicy>(m, store, std::move(innerDomain),
                                                    std::move(innerComm));
}

}  // namespace comtdp
