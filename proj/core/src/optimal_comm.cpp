#include "comtdp/optimal_comm.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <unordered_map>

namespace comtdp {

namespace {

std::vector<MessageId> goalMessageIds(const Model& m, const std::string& sigmaG) {
  std::vector<MessageId> ids(m.agentCount(), kNullMessage);
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    const auto& msgs = m.agents[i].messages;
    auto it = std::find(msgs.begin(), msgs.end(), sigmaG);
    if (it != msgs.end()) ids[i] = static_cast<MessageId>(it - msgs.begin()) + 1;
  }
  return ids;
}

void requireSigmaFree(const Model& m, const Evaluation& eval, const std::string& sigmaG) {
  auto ids = goalMessageIds(m, sigmaG);
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    if (ids[i] != kNullMessage && eval.expectedMessageCounts[i][ids[i]] > 0.0) {
      throw ContractError("communicationDelta: base policy already emits " + sigmaG);
    }
  }
}

/// Nodes at the event's epoch consistent with (T_G, K_G, beta), weights
/// renormalized to 1.
std::vector<TrajectoryNode> conditionNodes(const Model& m, const ReachResult& baseReach,
                                           const FirstKnowledgeEvent& ev,
                                           const GoalSet& goal) {
  std::vector<TrajectoryNode> out;
  double mass = 0.0;
  for (const auto& node : baseReach.epochs[ev.epoch]) {
    int tG = EvalContext::kNever;
    AgentId kG = -1;
    for (AgentId i = 0; i < m.agentCount(); ++i) {
      int fk = baseReach.context->firstKnowledgeEpoch(node.beliefs[i], goal);
      if (fk < tG) {
        tG = fk;
        kG = i;
      }
    }
    if (tG == ev.epoch && kG == ev.agent && node.beliefs[kG] == ev.belief) {
      out.push_back(node);
      mass += node.weight;
    }
  }
  if (out.empty() || mass <= 0.0) {
    throw ContractError("communicationDelta: conditioning event has zero probability");
  }
  for (auto& node : out) node.weight /= mass;
  return out;
}

struct BranchOutcome {
  double domainValue = 0.0;
  double commAtEvent = 0.0;
};

BranchOutcome rollBranch(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                         const CommPolicyPtr& variant, const ReachResult& baseReach,
                         const std::vector<TrajectoryNode>& start, int t0) {
  // Knowledge semantics must stay those of the unconditioned process, so
  // the conditioned roll extends a copy of the unconditioned context.
  EvalContext ctx = *baseReach.context;
  Evaluation eval = evaluateFrom(m, store, start, t0, domain, *variant, ctx);
  for (int t = t0 + 1; t <= m.horizon; ++t) {
    if (eval.perEpochMessages[t] != 0.0) {
      throw ContractError(
          "communicationDelta: premise violated, communication occurs after the "
          "announcement epoch (epoch " +
          std::to_string(t) + ")");
    }
  }
  return BranchOutcome{eval.domainValue, eval.perEpochCommReward[t0]};
}

}  // namespace

double communicationDelta(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                          const CommPolicyPtr& base, const ReachResult& baseReach,
                          const FirstKnowledgeEvent& ev, const GoalSet& goal,
                          const std::string& sigmaG) {
  requireSigmaFree(m, baseReach.eval, sigmaG);
  MessageId sigma = goalMessageIds(m, sigmaG)[ev.agent];
  if (sigma == kNullMessage) {
    throw ContractError("communicationDelta: agent " + m.agents[ev.agent].name +
                        " cannot send " + sigmaG);
  }

  auto start = conditionNodes(m, baseReach, ev, goal);
  CommPolicyPtr sendPolicy = overrideAt(base, ev.agent, ev.belief, sigma);
  CommPolicyPtr nullPolicy = overrideAt(base, ev.agent, ev.belief, kNullMessage);

  BranchOutcome send = rollBranch(m, store, domain, sendPolicy, baseReach, start, ev.epoch);
  BranchOutcome null = rollBranch(m, store, domain, nullPolicy, baseReach, start, ev.epoch);

  return (send.domainValue + send.commAtEvent) - (null.domainValue + null.commAtEvent);
}

double communicationDelta(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                          const CommPolicyPtr& base, const FirstKnowledgeEvent& ev,
                          const GoalSet& goal, const std::string& sigmaG) {
  ReachResult baseReach = reach(m, store, domain, *base, &goal);
  return communicationDelta(m, store, domain, base, baseReach, ev, goal, sigmaG);
}

LocalOptResult locallyOptimalPolicy(const Model& m, BeliefStore& store,
                                    const DomainPolicy& domain, const CommPolicyPtr& base,
                                    const GoalSet& goal, const std::string& sigmaG) {
  ReachResult baseReach = reach(m, store, domain, *base, &goal);
  requireSigmaFree(m, baseReach.eval, sigmaG);
  auto sigma = goalMessageIds(m, sigmaG);

  std::vector<FirstKnowledgeEvent> events = baseReach.events;
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.epoch, a.agent, a.belief) < std::tie(b.epoch, b.agent, b.belief);
  });

  LocalOptResult out;
  std::map<std::pair<AgentId, BeliefId>, MessageId> overrides;
  for (const auto& ev : events) {
    if (sigma[ev.agent] == kNullMessage) continue;  // this agent cannot announce
    double delta = communicationDelta(m, store, domain, base, baseReach, ev, goal, sigmaG);
    bool send = delta >= 0.0;  // ties send
    if (send) overrides[{ev.agent, ev.belief}] = sigma[ev.agent];
    out.decisions.push_back(EventDecision{ev, delta, send});
  }
  out.policy = overrideMany(base, std::move(overrides));
  return out;
}

// ---- global search -------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  int add() {
    parent.push_back(static_cast<int>(parent.size()));
    return static_cast<int>(parent.size()) - 1;
  }
};

struct ClosureNode {
  StateId state;
  std::vector<BeliefId> beliefs;  // pre-communication
  double weight;
  std::vector<int> pathPoints;  // decision points on this history, sorted
};

struct ClosureKey {
  StateId state;
  std::vector<BeliefId> beliefs;
  bool operator==(const ClosureKey&) const = default;
};
struct ClosureKeyHash {
  std::size_t operator()(const ClosureKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.state) * 0x9e3779b97f4a7c15ull;
    for (BeliefId b : k.beliefs) {
      h ^= static_cast<std::size_t>(b) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Forward enumeration that branches both ways at every eligible
/// announcement belief, collecting the union of reachable decision points
/// over the whole assignment family plus their co-occurrence relation.
struct ClosureResult {
  std::vector<DecisionPoint> points;             // canonical order
  std::vector<std::vector<std::size_t>> components;  // indices into points
};

ClosureResult enumerateDecisionPoints(const Model& m, BeliefStore& store,
                                      const DomainPolicy& domain, const CommPolicy& base,
                                      const GoalSet& goal,
                                      const std::vector<MessageId>& sigma, int window,
                                      const EvalOptions& opts) {
  EvalContext ctx(m, store);
  {
    std::vector<StateId> support;
    for (const auto& [s, p] : m.initial) {
      if (p > 0.0) support.push_back(s);
    }
    std::sort(support.begin(), support.end());
    for (AgentId i = 0; i < m.agentCount(); ++i) ctx.registerBelief(store.root(i), support);
  }

  std::map<std::pair<AgentId, BeliefId>, int> pointIndex;
  std::vector<DecisionPoint> points;
  UnionFind uf;

  auto sigmaInHistory = [&](BeliefId b) {
    for (BeliefId cur = b; cur != kNoBelief; cur = store.parent(cur)) {
      if (store.kind(cur) == BeliefStore::Kind::kPostComm) {
        JointMessageId jm = store.lastMessage(cur);
        for (AgentId j = 0; j < m.agentCount(); ++j) {
          if (sigma[j] != kNullMessage && m.agentMessage(jm, j) == sigma[j]) return true;
        }
      }
    }
    return false;
  };

  // Initial nodes.
  std::vector<ClosureNode> nodes;
  {
    std::unordered_map<ClosureKey, std::size_t, ClosureKeyHash> index;
    for (const auto& [s0, p0] : m.initial) {
      if (p0 <= 0.0) continue;
      for (const auto& e : m.observationDistribution(s0, std::nullopt)) {
        ClosureNode node;
        node.state = s0;
        node.weight = p0 * e.p;
        for (AgentId i = 0; i < m.agentCount(); ++i) {
          node.beliefs.push_back(store.withObservation(store.root(i), e.obs[i]));
        }
        ClosureKey key{node.state, node.beliefs};
        auto it = index.find(key);
        if (it == index.end()) {
          index.emplace(key, nodes.size());
          nodes.push_back(std::move(node));
        } else {
          nodes[it->second].weight += node.weight;
        }
      }
    }
  }

  const JointActionId nA = m.jointActionCount();

  for (int t = 0; t <= m.horizon; ++t) {
    // Union statesets for this epoch's pre-communication beliefs.
    {
      std::unordered_map<BeliefId, std::vector<StateId>> buckets;
      for (const auto& node : nodes) {
        for (BeliefId b : node.beliefs) {
          if (!ctx.hasBelief(b)) buckets[b].push_back(node.state);
        }
      }
      std::vector<BeliefId> order;
      for (auto& [b, v] : buckets) order.push_back(b);
      std::sort(order.begin(), order.end());
      for (BeliefId b : order) {
        auto& v = buckets[b];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        ctx.registerBelief(b, std::move(v));
      }
    }
    // Expand with branching at eligible beliefs.
    const bool lastEpoch = t == m.horizon;
    std::vector<ClosureNode> next;
    std::unordered_map<ClosureKey, std::size_t, ClosureKeyHash> index;
    std::unordered_map<BeliefId, std::vector<StateId>> postBuckets;

    struct Pending {
      StateId state;
      double weight;
      std::vector<int> path;
      std::vector<BeliefId> post;
    };
    std::vector<Pending> pending;

    for (const auto& node : nodes) {
      // Per-agent message choices.
      std::vector<std::vector<std::pair<MessageId, int>>> choices(m.agentCount());
      std::vector<int> touchedHere;
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        MessageId baseMsg = base.chooseMessage(ctx, i, node.beliefs[i]);
        choices[i].push_back({baseMsg, -1});
        if (sigma[i] == kNullMessage || baseMsg == sigma[i]) continue;
        BeliefId b = node.beliefs[i];
        if (!ctx.knowsGoal(b, goal)) continue;
        int fk = ctx.firstKnowledgeEpoch(b, goal);
        if (fk == EvalContext::kAtRoot || fk == EvalContext::kNever) continue;
        if (t - fk > window) continue;
        if (sigmaInHistory(b)) continue;
        auto key = std::make_pair(i, b);
        auto it = pointIndex.find(key);
        int p;
        if (it == pointIndex.end()) {
          p = uf.add();
          pointIndex.emplace(key, p);
          points.push_back(DecisionPoint{t, i, b});
        } else {
          p = it->second;
        }
        touchedHere.push_back(p);
        choices[i].push_back({sigma[i], p});
      }
      // Points touched on one history co-occur.
      for (int p : touchedHere) {
        for (int q : node.pathPoints) uf.unite(p, q);
      }
      for (std::size_t a = 0; a + 1 < touchedHere.size(); ++a) {
        uf.unite(touchedHere[a], touchedHere[a + 1]);
      }

      std::vector<int> childPath = node.pathPoints;
      childPath.insert(childPath.end(), touchedHere.begin(), touchedHere.end());
      std::sort(childPath.begin(), childPath.end());
      childPath.erase(std::unique(childPath.begin(), childPath.end()), childPath.end());

      if (lastEpoch) continue;  // messages at T collected, no expansion

      // All joint message combinations.
      std::vector<std::vector<MessageId>> combos{{}};
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        std::vector<std::vector<MessageId>> grown;
        for (const auto& prefix : combos) {
          for (const auto& [msg, p] : choices[i]) {
            auto v = prefix;
            v.push_back(msg);
            grown.push_back(std::move(v));
          }
        }
        combos = std::move(grown);
      }

      for (const auto& msgs : combos) {
        JointMessageId jm = m.packMessage(msgs);
        std::vector<BeliefId> post(m.agentCount());
        for (AgentId i = 0; i < m.agentCount(); ++i) {
          post[i] = store.withMessages(node.beliefs[i], jm);
          if (!ctx.hasBelief(post[i])) postBuckets[post[i]].push_back(node.state);
        }
        // Stash expansion work until post statesets are registered.
        pending.push_back({node.state, node.weight, childPath, std::move(post)});
      }
    }

    if (lastEpoch) break;

    // Register post-communication statesets, then expand.
    {
      std::vector<BeliefId> order;
      for (auto& [b, v] : postBuckets) order.push_back(b);
      std::sort(order.begin(), order.end());
      for (BeliefId b : order) {
        auto& v = postBuckets[b];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        ctx.registerBelief(b, std::move(v));
      }
    }

    for (const auto& item : pending) {
      std::vector<ActionId> acts(m.agentCount());
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        acts[i] = domain.chooseAction(ctx, i, item.post[i]);
      }
      JointActionId ja = m.packAction(acts);
      const auto& successors = m.transition[static_cast<std::size_t>(item.state) * nA + ja];
      for (const auto& [s2, p1] : successors) {
        if (p1 <= 0.0) continue;
        for (const auto& e : m.observationDistribution(s2, ja)) {
          double w = item.weight * p1 * e.p;
          if (w < opts.pruneThreshold) continue;
          ClosureNode child;
          child.state = s2;
          child.weight = w;
          child.pathPoints = item.path;
          for (AgentId i = 0; i < m.agentCount(); ++i) {
            child.beliefs.push_back(store.withObservation(item.post[i], e.obs[i]));
          }
          ClosureKey key{child.state, child.beliefs};
          auto it = index.find(key);
          if (it == index.end()) {
            index.emplace(key, next.size());
            next.push_back(std::move(child));
          } else {
            next[it->second].weight += child.weight;
          }
        }
      }
    }

    std::sort(next.begin(), next.end(), [](const ClosureNode& a, const ClosureNode& b) {
      if (a.state != b.state) return a.state < b.state;
      return a.beliefs < b.beliefs;
    });
    nodes = std::move(next);
  }

  // Canonical point order and component grouping.
  ClosureResult out;
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(points[a].epoch, points[a].agent, points[a].belief) <
           std::tie(points[b].epoch, points[b].agent, points[b].belief);
  });
  std::map<int, std::vector<std::size_t>> byRoot;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    std::size_t orig = order[rank];
    out.points.push_back(points[orig]);
    byRoot[uf.find(static_cast<int>(orig))].push_back(rank);
  }
  // Components ordered by their first point's canonical rank.
  std::vector<std::vector<std::size_t>> comps;
  for (auto& [root, members] : byRoot) {
    std::sort(members.begin(), members.end());
    comps.push_back(std::move(members));
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  out.components = std::move(comps);
  return out;
}

}  // namespace

GlobalOptResult globallyOptimalComm(const Model& m, BeliefStore& store,
                                    const DomainPolicy& domain, const CommPolicyPtr& base,
                                    const GoalSet& goal, const std::string& sigmaG,
                                    const CommSearchSpace& space) {
  auto startTime = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - startTime)
        .count();
  };

  ReachResult baseReach = reach(m, store, domain, *base, &goal);
  requireSigmaFree(m, baseReach.eval, sigmaG);
  auto sigma = goalMessageIds(m, sigmaG);

  EvalOptions opts;
  ClosureResult closure =
      enumerateDecisionPoints(m, store, domain, *base, goal, sigma, space.window, opts);

  double bound = 0.0;
  for (const auto& comp : closure.components) bound += std::pow(2.0, comp.size());
  if (bound > std::pow(2.0, space.maxDecisionPoints)) {
    throw BudgetExceededError(closure.points.size(), bound, space.maxDecisionPoints);
  }

  GlobalOptResult out;
  out.points = closure.points;
  out.assignment.assign(closure.points.size(), 0);
  out.componentCount = static_cast<int>(closure.components.size());

  auto evaluateAssignment = [&](const std::vector<std::uint8_t>& assignment) {
    std::map<std::pair<AgentId, BeliefId>, MessageId> overrides;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i]) {
        overrides[{closure.points[i].agent, closure.points[i].belief}] =
            sigma[closure.points[i].agent];
      }
    }
    CommPolicyPtr candidate = overrideMany(base, std::move(overrides));
    Evaluation eval = evaluate(m, store, domain, *candidate);
    ++out.evaluations;
    return std::make_pair(eval.value, eval.totalExpectedMessages());
  };

  for (const auto& comp : closure.components) {
    std::vector<std::uint8_t> best;
    double bestValue = 0.0, bestMessages = 0.0;
    bool haveBest = false;
    std::size_t k = comp.size();
    for (std::size_t x = 0; x < (std::size_t{1} << k); ++x) {
      if (space.maxSeconds > 0.0 && elapsed() > space.maxSeconds) {
        throw BudgetExceededError(closure.points.size(), bound, space.maxDecisionPoints);
      }
      std::vector<std::uint8_t> assignment = out.assignment;
      for (std::size_t j = 0; j < k; ++j) {
        assignment[comp[j]] = (x >> (k - 1 - j)) & 1 ? 1 : 0;
      }
      auto [value, messages] = evaluateAssignment(assignment);
      // Strict improvement required: the first candidate in lexicographic
      // order wins ties on (value, messages).
      if (!haveBest || value > bestValue ||
          (value == bestValue && messages < bestMessages)) {
        haveBest = true;
        bestValue = value;
        bestMessages = messages;
        best = assignment;
      }
    }
    out.assignment = best;
  }

  {
    std::map<std::pair<AgentId, BeliefId>, MessageId> overrides;
    for (std::size_t i = 0; i < out.assignment.size(); ++i) {
      if (out.assignment[i]) {
        overrides[{closure.points[i].agent, closure.points[i].belief}] =
            sigma[closure.points[i].agent];
      }
    }
    out.policy = overrideMany(base, std::move(overrides));
    Evaluation eval = evaluate(m, store, domain, *out.policy);
    out.value = eval.value;
    out.expectedMessages = eval.totalExpectedMessages();
  }
  out.seconds = elapsed();
  return out;
}

}  // namespace comtdp
