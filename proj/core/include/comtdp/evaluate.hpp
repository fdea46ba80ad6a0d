#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "comtdp/belief.hpp"
#include "comtdp/model.hpp"
#include "comtdp/numeric.hpp"
#include "comtdp/policy.hpp"
#include "comtdp/types.hpp"

namespace comtdp {

/**
 * @brief Reachability knowledge shared between the engine and policies.
 *
 * Maps every belief visited by an exact enumeration to the set of world
 * states it is consistent with (states that co-occur with the belief on
 * some positive-probability trajectory under the policy pair in play).
 * Communication policies use this to decide whether a belief implies a
 * goal with certainty.
 */
class EvalContext {
 public:
  EvalContext(const Model& m, BeliefStore& store) : model_(&m), store_(&store) {}

  const Model& model() const { return *model_; }
  BeliefStore& store() const { return *store_; }

  /// States consistent with the belief, or nullptr if the belief was never
  /// reached by the enumeration that built this context.
  const std::vector<StateId>* statesFor(BeliefId b) const;

  /// True iff the belief was reached and every consistent state is in goal.
  bool knowsGoal(BeliefId b, const GoalSet& goal) const;

  /// True iff the belief knows the goal and its one-step-shorter prefix
  /// does not (the prefix is the post-communication belief of the previous
  /// epoch, or the empty history).
  bool firstKnowsGoal(BeliefId b, const GoalSet& goal) const;

  /// Earliest epoch at which a pre-communication prefix of b (including b
  /// itself) knows the goal. Returns kNever if none does, kAtRoot if the
  /// empty history already knows.
  static constexpr int kNever = INT32_MAX;
  static constexpr int kAtRoot = -1;
  int firstKnowledgeEpoch(BeliefId b, const GoalSet& goal) const;

  /// Registers states for a belief; only the first registration of a given
  /// belief is kept (later enumerations must not redefine semantics).
  void registerBelief(BeliefId b, std::vector<StateId> states);
  bool hasBelief(BeliefId b) const { return statesets_.count(b) != 0; }

 private:
  const Model* model_;
  BeliefStore* store_;
  std::unordered_map<BeliefId, std::vector<StateId>> statesets_;
};

/// A probability-weighted joint configuration reachable at one epoch:
/// world state plus every agent's pre-communication belief.
struct TrajectoryNode {
  StateId state = 0;
  std::vector<BeliefId> beliefs;  // pre-communication, one per agent
  double weight = 0.0;
  double accReward = 0.0;  // reward accumulated before this epoch
};

struct Evaluation {
  double value = 0.0;                     // expected cumulative reward, epochs 0..T
  double domainValue = 0.0;               // same, counting domain rewards only
  std::vector<double> perEpochReward;     // total reward by epoch
  std::vector<double> perEpochCommReward; // communication component by epoch
  std::vector<double> perEpochMessages;   // expected non-null emissions by epoch
  // expectedMessageCounts[agent][msg] = expected number of epochs at which
  // the agent emits message id msg (msg >= 1; the null slot 0 stays 0).
  std::vector<std::vector<double>> expectedMessageCounts;
  std::size_t nodeCount = 0;
  double prunedMass = 0.0;

  double expectedMessages(AgentId agent, MessageId msg) const {
    return expectedMessageCounts[agent][msg];
  }
  double totalExpectedMessages() const;
};

/// The event that some agent is the first on a trajectory whose
/// pre-communication belief implies the goal with certainty.
struct FirstKnowledgeEvent {
  int epoch = 0;         // T_G
  AgentId agent = 0;     // K_G (ties broken by agent order)
  BeliefId belief = 0;   // the agent's pre-communication belief
  double probability = 0.0;
};

struct ReachResult {
  std::vector<std::vector<TrajectoryNode>> epochs;  // index t = 0..T
  std::shared_ptr<EvalContext> context;
  std::vector<FirstKnowledgeEvent> events;  // populated when a goal is given
  Evaluation eval;                          // of the unconditioned process
};

struct EvalOptions {
  double pruneThreshold = kWeightPruneThreshold;
};

/// Exact expected cumulative reward of the policy pair over the full
/// horizon (Markov-chain forward enumeration with node merging).
Evaluation evaluate(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                    const CommPolicy& comm, const EvalOptions& opts = {});

/// All positive-probability trajectory nodes per epoch. When a goal is
/// given, first-knowledge events are collected. When `condition` is given,
/// epochs before the event are empty and nodes from the event's epoch on
/// are renormalized by the event's probability; conditioning on an event
/// not reachable under the policies is an error.
ReachResult reach(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                  const CommPolicy& comm, const GoalSet* goal = nullptr,
                  const std::optional<FirstKnowledgeEvent>& condition = std::nullopt,
                  const EvalOptions& opts = {});

/// Continues an enumeration from explicit start nodes at `startEpoch`,
/// reusing (and extending) a previously built context so that knowledge
/// semantics stay those of the unconditioned process.
Evaluation evaluateFrom(const Model& m, BeliefStore& store,
                        const std::vector<TrajectoryNode>& startNodes, int startEpoch,
                        const DomainPolicy& domain, const CommPolicy& comm,
                        EvalContext& context, const EvalOptions& opts = {});

struct RolloutEstimate {
  double mean = 0.0;
  double stderror = 0.0;
  int samples = 0;
};

/// Monte Carlo cross-check: mean cumulative reward of n seeded episodes.
/// Reproducible given (seed, n). Runs one exact reachability pass first so
/// that knowledge-based policies see the same consistent-state sets as
/// under exact evaluation.
RolloutEstimate rollout(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                        const CommPolicy& comm, int n, std::uint64_t seed);

/// Expected number of epochs at which any agent emits the named symbol.
double expectedMessages(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                        const CommPolicy& comm, const std::string& symbol);

}  // namespace comtdp
