#pragma once

#include <map>
#include <string>
#include <vector>

#include "comtdp/evaluate.hpp"
#include "comtdp/model.hpp"
#include "comtdp/policy.hpp"

namespace comtdp {

/**
 * @brief A decentralized POMDP: joint tables, no message channel.
 *
 * States and joint observations are opaque indices. The observation table
 * is joint (per-agent observation vectors), keyed like the Model's: by
 * state and previous joint action with a reserved null-action key.
 */
struct DecPomdp {
  std::vector<std::string> states;
  std::vector<AgentDef> agents;  // messages must be empty
  std::vector<std::vector<std::pair<StateId, double>>> transition;  // [s*nA+a]
  std::vector<std::vector<JointObsEntry>> observation;              // [s*(nA+1)+key]
  std::vector<double> reward;                                       // [s*nA+a]
  std::vector<std::pair<StateId, double>> initial;

  int agentCount() const { return static_cast<int>(agents.size()); }
  JointActionId jointActionCount() const;
};

/// A single-agent POMDP in the same table conventions.
struct Pomdp {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<std::vector<std::pair<StateId, double>>> transition;   // [s*nA+a]
  std::vector<std::vector<std::pair<ObsId, double>>> observation;    // [s*(nA+1)+key]
  std::vector<double> reward;                                        // [s*nA+a]
  std::vector<std::pair<StateId, double>> initial;
};

/// A deterministic joint policy for a DecPomdp: per agent, a mapping from
/// own-observation histories to actions.
struct DecPolicy {
  // table[agent][history] with histories as observation id sequences
  std::vector<std::map<std::vector<ObsId>, ActionId>> table;

  ActionId action(AgentId i, const std::vector<ObsId>& history) const;
};

/// A deterministic POMDP policy: observation histories to actions.
struct PomdpPolicy {
  std::map<std::vector<ObsId>, ActionId> table;
  ActionId action(const std::vector<ObsId>& history) const;
};

// ---- constructions -------------------------------------------------------

/// Embeds a DecPomdp as a no-communication model: every component copied,
/// message alphabets empty. `horizon` fixes the evaluation length.
Model liftDecPomdp(const DecPomdp& d, int horizon);

/// Adapts a DecPomdp joint policy to a domain policy on the lifted model
/// (histories with all-null message slots), value-preserving.
DomainPolicyPtr liftedDomainPolicy(const Model& lifted, const DecPomdp& d, DecPolicy policy);

/// Reads a lifted-model domain policy back into a DecPomdp joint policy on
/// the given histories (the inverse direction of the adapter above).
DecPolicy lowerDomainPolicy(const Model& lifted, BeliefStore& store, const DomainPolicy& policy,
                            const std::vector<std::vector<std::vector<ObsId>>>& histories);

/// Collapses a free-communication model to a single-agent POMDP whose
/// actions are the joint actions and whose observations are the joint
/// observations. Message alphabets are widened to carry observations
/// first (reward-neutral under free communication). Throws ContractError
/// if communication is not free.
struct CollapsedPomdp {
  Pomdp pomdp;
  Model widenedModel;  // the input with message alphabets covering observations
  // joint observation vector <-> collapsed observation symbol
  std::map<std::vector<ObsId>, ObsId> obsIndex;
  std::vector<std::vector<ObsId>> obsVectors;
};
CollapsedPomdp collapseFreeComm(const Model& m);

/// Adapts a POMDP policy to a domain policy on the widened model paired
/// with fullCommPolicy: every agent reconstructs the joint observation
/// history from the broadcast messages and acts as the POMDP policy does.
DomainPolicyPtr collapsedDomainPolicy(const CollapsedPomdp& c, PomdpPolicy policy);

/// Theorem-2-style mapping: turns any policy pair into a domain policy of
/// equal value when paired with fullCommPolicy on a free-communication
/// model. The inner policies must not consult reachability context.
DomainPolicyPtr dominanceTransform(const Model& m, BeliefStore& store,
                                   DomainPolicyPtr innerDomain, CommPolicyPtr innerComm);

}  // namespace comtdp
