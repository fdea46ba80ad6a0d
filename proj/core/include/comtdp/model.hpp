#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "comtdp/types.hpp"

namespace comtdp {

/// One named finite state feature; the world state space is the cross
/// product of all feature domains.
struct FeatureDef {
  std::string name;
  std::vector<std::string> values;
};

/// Per-agent finite alphabets. `messages` lists the explicit (non-null)
/// message symbols; every agent can always stay silent (the null message).
struct AgentDef {
  std::string name;
  std::vector<std::string> actions;
  std::vector<std::string> messages;
  std::vector<std::string> observations;
};

/// Sparse categorical distribution over per-agent observation vectors.
struct JointObsEntry {
  std::vector<ObsId> obs;  // one entry per agent
  double p = 0.0;
};

struct ValidationIssue {
  std::string table;    // which table the violation is in
  std::string key;      // row / index within the table
  std::string message;  // the violated invariant
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

enum class Observability {
  kIndividuallyObservable,
  kCollectivelyObservable,
  kCollectivelyPartiallyObservable,
  kNonObservable,
};

enum class CommCost { kFree, kNone, kGeneral };

std::string toString(Observability o);
std::string toString(CommCost c);

/**
 * @brief A finite communicative multiagent team decision problem.
 *
 * All tables are indexed by dense ids: states are a mixed-radix code over
 * feature values, joint actions and joint messages are mixed-radix codes
 * over per-agent ids. Observations are stored factored per agent whenever
 * the joint distribution is a product of per-agent distributions; otherwise
 * a joint table is used. Observation rows are keyed by the *previous*
 * joint action, with a reserved null-action key for the initial epoch.
 *
 * A Model is immutable after construction (by convention: nothing mutates
 * one once built), so instances may be shared freely between threads.
 */
struct Model {
  std::vector<FeatureDef> features;
  std::vector<AgentDef> agents;

  // transition[s * jointActionCount + a] -> sparse successor distribution
  std::vector<std::vector<std::pair<StateId, double>>> transition;

  // Factored observations: obsFactored[agent][s * (jointActionCount+1) + key]
  // where key 0 is the reserved null action and key (a+1) is joint action a.
  // Exactly one of obsFactored / obsJoint is populated.
  std::vector<std::vector<std::vector<std::pair<ObsId, double>>>> obsFactored;
  std::vector<std::vector<JointObsEntry>> obsJoint;  // same (s, key) indexing

  std::vector<double> rewardDomain;  // [s * jointActionCount + a]
  std::vector<double> rewardComm;    // [s * jointMessageCount + m]

  std::vector<std::pair<StateId, double>> initial;
  int horizon = 0;

  // ---- id arithmetic -------------------------------------------------

  int agentCount() const { return static_cast<int>(agents.size()); }
  StateId stateCount() const;
  JointActionId jointActionCount() const;
  JointMessageId jointMessageCount() const;

  StateId packState(const std::vector<int>& featureValues) const;
  std::vector<int> unpackState(StateId s) const;
  int featureValue(StateId s, int feature) const;

  JointActionId packAction(const std::vector<ActionId>& perAgent) const;
  std::vector<ActionId> unpackAction(JointActionId a) const;
  ActionId agentAction(JointActionId a, AgentId i) const;

  // Per-agent message ids: 0 = null, k = k-th symbol in agents[i].messages.
  int messageCount(AgentId i) const { return static_cast<int>(agents[i].messages.size()) + 1; }
  JointMessageId packMessage(const std::vector<MessageId>& perAgent) const;
  std::vector<MessageId> unpackMessage(JointMessageId m) const;
  MessageId agentMessage(JointMessageId m, AgentId i) const;

  bool factoredObservations() const { return !obsFactored.empty(); }

  /// Observation-table key for the action taken in the previous epoch;
  /// pass std::nullopt for the initial epoch.
  std::size_t obsKey(StateId s, std::optional<JointActionId> prev) const;

  /// Joint observation distribution at (s, previous action), expanded to
  /// per-agent observation vectors. Zero-probability entries are skipped.
  std::vector<JointObsEntry> observationDistribution(StateId s,
                                                     std::optional<JointActionId> prev) const;

  // ---- symbol lookup -------------------------------------------------

  int featureIndex(const std::string& name) const;
  int featureValueIndex(int feature, const std::string& value) const;
  AgentId agentIndex(const std::string& name) const;
  ActionId actionIndex(AgentId i, const std::string& name) const;
  MessageId messageIndex(AgentId i, const std::string& name) const;  // "null" -> 0
  ObsId observationIndex(AgentId i, const std::string& name) const;

  std::string stateName(StateId s) const;
  std::string jointActionName(JointActionId a) const;
  std::string jointMessageName(JointMessageId m) const;
};

/// Checks the distributional invariants: every transition and observation
/// row normalizes to 1 +- 1e-9, probabilities lie in [0, 1], communication
/// rewards are non-positive with a zero reward for the all-null vector,
/// and the initial distribution normalizes. Violations are returned as
/// data, not thrown.
ValidationReport validate(const Model& m);

/// Exact predicate evaluation over the observation tables, reporting the
/// most specific class that holds. Non-observability (some observation has
/// probability one everywhere, for every agent) is checked first.
Observability classifyObservability(const Model& m);

/// kNone if no agent has any non-null message; else kFree if the
/// communication reward is identically zero; else kGeneral.
CommCost classifyCommunication(const Model& m);

}  // namespace comtdp
