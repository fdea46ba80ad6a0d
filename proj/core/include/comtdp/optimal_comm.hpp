#pragma once

#include <string>
#include <vector>

#include "comtdp/evaluate.hpp"
#include "comtdp/model.hpp"
#include "comtdp/policy.hpp"

namespace comtdp {

/**
 * @brief Expected-value difference that hinges on one announcement.
 *
 * Conditions the process on the first-knowledge event (renormalized reach
 * nodes at the event's epoch), rolls the future forward twice -- once with
 * the knowing agent's message overridden to sigmaG, once overridden to
 * null -- and returns the difference: future domain reward plus the
 * communication cost difference at the event's epoch.
 *
 * Preconditions: `base` never emits sigmaG anywhere reachable, the event
 * has positive probability, and nobody communicates after the event's
 * epoch under either branch (violations throw ContractError).
 */
double communicationDelta(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                          const CommPolicyPtr& base, const FirstKnowledgeEvent& ev,
                          const GoalSet& goal, const std::string& sigmaG);

/// Same, reusing an already-computed unconditioned reach of (domain, base).
double communicationDelta(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                          const CommPolicyPtr& base, const ReachResult& baseReach,
                          const FirstKnowledgeEvent& ev, const GoalSet& goal,
                          const std::string& sigmaG);

struct EventDecision {
  FirstKnowledgeEvent event;
  double delta = 0.0;
  bool send = false;
};

struct LocalOptResult {
  CommPolicyPtr policy;
  std::vector<EventDecision> decisions;
};

/// Overrides `base` at every positive-probability first-knowledge event of
/// an agent that can announce: send sigmaG iff the event's delta is >= 0
/// (ties send). Events are enumerated from the reachable set under
/// (domain, base).
LocalOptResult locallyOptimalPolicy(const Model& m, BeliefStore& store,
                                    const DomainPolicy& domain, const CommPolicyPtr& base,
                                    const GoalSet& goal, const std::string& sigmaG);

/// Restricted brute-force search space: at every belief that implies the
/// goal, has not already announced it, and lies within `window` epochs of
/// the owner's first knowledge, the policy may choose between its base
/// message and sigmaG.
struct CommSearchSpace {
  int window = 2;
  int maxDecisionPoints = 20;  // budget: sum over components of 2^|c| <= 2^N
  double maxSeconds = 0.0;     // 0 = no time limit
};

struct DecisionPoint {
  int epoch = 0;
  AgentId agent = 0;
  BeliefId belief = 0;
};

struct GlobalOptResult {
  CommPolicyPtr policy;
  double value = 0.0;
  double expectedMessages = 0.0;
  std::vector<DecisionPoint> points;
  std::vector<std::uint8_t> assignment;  // 1 = send sigmaG, aligned with points
  int componentCount = 0;
  std::size_t evaluations = 0;
  double seconds = 0.0;
};

class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(std::size_t points, double bound, int maxPoints)
      : std::runtime_error("global search budget exceeded: " + std::to_string(points) +
                           " decision points need ~" + std::to_string(bound) +
                           " evaluations, limit 2^" + std::to_string(maxPoints)),
        points_(points),
        bound_(bound) {}
  std::size_t points() const { return points_; }
  double bound() const { return bound_; }

 private:
  std::size_t points_;
  double bound_;
};

/**
 * @brief Exhaustive send/null assignment search over the decision points.
 *
 * Decision points that can never share a trajectory are independent, so
 * the search enumerates each co-occurrence component exhaustively and
 * composes the per-component optima; this is value-equivalent to
 * enumerating the full cross product. Every candidate is scored with a
 * full evaluate() call. Ties break toward fewer expected messages, then
 * the lexicographically smallest assignment in (epoch, agent, belief)
 * point order with null < send.
 */
GlobalOptResult globallyOptimalComm(const Model& m, BeliefStore& store,
                                    const DomainPolicy& domain, const CommPolicyPtr& base,
                                    const GoalSet& goal, const std::string& sigmaG,
                                    const CommSearchSpace& space = {});

}  // namespace comtdp
