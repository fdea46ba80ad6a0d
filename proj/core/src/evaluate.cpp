#include "comtdp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "comtdp/numeric.hpp"

namespace comtdp {

const std::vector<StateId>* EvalContext::statesFor(BeliefId b) const {
  auto it = statesets_.find(b);
  return it == statesets_.end() ? nullptr : &it->second;
}

bool EvalContext::knowsGoal(BeliefId b, const GoalSet& goal) const {
  const auto* states = statesFor(b);
  return states != nullptr && goal.containsAll(*states);
}

bool EvalContext::firstKnowsGoal(BeliefId b, const GoalSet& goal) const {
  if (!knowsGoal(b, goal)) return false;
  BeliefId prefix = store_->parent(b);
  if (prefix == kNoBelief) return true;
  return !knowsGoal(prefix, goal);
}

int EvalContext::firstKnowledgeEpoch(BeliefId b, const GoalSet& goal) const {
  // Walk the pre-communication prefixes from the oldest to the newest.
  std::vector<BeliefId> chain;
  for (BeliefId cur = b; cur != kNoBelief; cur = store_->parent(cur)) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());
  for (BeliefId id : chain) {
    switch (store_->kind(id)) {
      case BeliefStore::Kind::kRoot:
        if (knowsGoal(id, goal)) return kAtRoot;
        break;
      case BeliefStore::Kind::kPreComm:
        if (knowsGoal(id, goal)) return store_->epoch(id);
        break;
      default:
        break;
    }
  }
  return kNever;
}

void EvalContext::registerBelief(BeliefId b, std::vector<StateId> states) {
  statesets_.emplace(b, std::move(states));
}

double Evaluation::totalExpectedMessages() const {
  double total = 0.0;
  for (const auto& perAgent : expectedMessageCounts) {
    for (std::size_t msg = 1; msg < perAgent.size(); ++msg) total += perAgent[msg];
  }
  return total;
}

namespace {

struct NodeKey {
  StateId state;
  std::vector<BeliefId> beliefs;
  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.state) * 0x9e3779b97f4a7c15ull;
    for (BeliefId b : k.beliefs) {
      h ^= static_cast<std::size_t>(b) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

bool nodeLess(const TrajectoryNode& a, const TrajectoryNode& b) {
  if (a.state != b.state) return a.state < b.state;
  return a.beliefs < b.beliefs;
}

/// One forward pass of the exact Markov-chain enumeration. Both evaluate()
/// and reach() are thin wrappers around this.
class Enumerator {
 public:
  Enumerator(const Model& m, BeliefStore& store, const DomainPolicy& domain,
             const CommPolicy& comm, EvalContext& ctx, const EvalOptions& opts)
      : m_(m), store_(store), domain_(domain), comm_(comm), ctx_(ctx), opts_(opts) {}

  bool keepEpochs = false;
  const GoalSet* goal = nullptr;

  std::vector<TrajectoryNode> initialNodes() {
    std::vector<TrajectoryNode> nodes;
    std::unordered_map<NodeKey, std::size_t, NodeKeyHash> index;
    for (const auto& [s0, p0] : m_.initial) {
      if (p0 <= 0.0) continue;
      for (const auto& e : m_.observationDistribution(s0, std::nullopt)) {
        TrajectoryNode node;
        node.state = s0;
        node.weight = p0 * e.p;
        node.accReward = 0.0;
        node.beliefs.reserve(m_.agentCount());
        for (AgentId i = 0; i < m_.agentCount(); ++i) {
          node.beliefs.push_back(store_.withObservation(store_.root(i), e.obs[i]));
        }
        mergeInto(nodes, index, std::move(node));
      }
    }
    std::sort(nodes.begin(), nodes.end(), nodeLess);
    return nodes;
  }

  /// Runs epochs startEpoch..horizon from the given start nodes.
  Evaluation run(std::vector<TrajectoryNode> nodes, int startEpoch) {
    Evaluation out;
    const int T = m_.horizon;
    out.perEpochReward.assign(T + 1, 0.0);
    out.perEpochCommReward.assign(T + 1, 0.0);
    out.perEpochMessages.assign(T + 1, 0.0);
    out.expectedMessageCounts.resize(m_.agentCount());
    for (AgentId i = 0; i < m_.agentCount(); ++i) {
      out.expectedMessageCounts[i].assign(m_.messageCount(i), 0.0);
    }
    if (keepEpochs) epochs_.assign(T + 1, {});

    KahanAccumulator total, domainTotal, pruned;

    // Register the roots once so prefix knowledge checks reach the prior.
    if (startEpoch == 0 && !ctx_.hasBelief(store_.root(0))) {
      std::vector<StateId> support;
      for (const auto& [s, p] : m_.initial) {
        if (p > 0.0) support.push_back(s);
      }
      std::sort(support.begin(), support.end());
      for (AgentId i = 0; i < m_.agentCount(); ++i) {
        ctx_.registerBelief(store_.root(i), support);
      }
    }

    const JointActionId nA = m_.jointActionCount();
    const JointMessageId nM = m_.jointMessageCount();

    for (int t = startEpoch; t <= T; ++t) {
      registerStatesets(nodes);
      if (goal != nullptr) collectEvents(nodes, t);
      if (keepEpochs) epochs_[t] = nodes;
      out.nodeCount += nodes.size();

      KahanAccumulator epochReward, epochComm;
      std::vector<TrajectoryNode> next;
      std::unordered_map<NodeKey, std::size_t, NodeKeyHash> index;

      // Message phase for every node first: post-communication statesets
      // must be complete before any domain-policy query sees them.
      std::vector<JointMessageId> stagedMsg(nodes.size());
      std::vector<std::vector<BeliefId>> stagedPost(nodes.size());
      std::unordered_map<BeliefId, std::vector<StateId>> postBuckets;
      for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
        const TrajectoryNode& node = nodes[idx];
        std::vector<MessageId> msgs(m_.agentCount());
        for (AgentId i = 0; i < m_.agentCount(); ++i) {
          msgs[i] = cachedMessage(i, node.beliefs[i], t);
          if (msgs[i] != kNullMessage) {
            out.expectedMessageCounts[i][msgs[i]] += node.weight;
            out.perEpochMessages[t] += node.weight;
          }
        }
        JointMessageId jm = m_.packMessage(msgs);
        stagedMsg[idx] = jm;
        stagedPost[idx].resize(m_.agentCount());
        for (AgentId i = 0; i < m_.agentCount(); ++i) {
          BeliefId post = store_.withMessages(node.beliefs[i], jm);
          stagedPost[idx][i] = post;
          if (!ctx_.hasBelief(post)) postBuckets[post].push_back(node.state);
        }
      }
      registerBuckets(postBuckets);

      for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
        const TrajectoryNode& node = nodes[idx];
        JointMessageId jm = stagedMsg[idx];
        const std::vector<BeliefId>& postBeliefs = stagedPost[idx];
        std::vector<ActionId> acts(m_.agentCount());
        for (AgentId i = 0; i < m_.agentCount(); ++i) {
          acts[i] = cachedAction(i, postBeliefs[i], t);
        }
        JointActionId ja = m_.packAction(acts);

        double rA = m_.rewardDomain[static_cast<std::size_t>(node.state) * nA + ja];
        double rC = m_.rewardComm[static_cast<std::size_t>(node.state) * nM + jm];
        epochReward.add(node.weight * (rA + rC));
        epochComm.add(node.weight * rC);
        domainTotal.add(node.weight * rA);

        if (t == T) continue;

        // Transition and observation phases.
        double acc = node.accReward + rA + rC;
        const auto& successors = m_.transition[static_cast<std::size_t>(node.state) * nA + ja];
        for (const auto& [s2, p1] : successors) {
          if (p1 <= 0.0) continue;
          for (const auto& e : m_.observationDistribution(s2, ja)) {
            double w = node.weight * p1 * e.p;
            if (w < opts_.pruneThreshold) {
              pruned.add(w);
              continue;
            }
            TrajectoryNode child;
            child.state = s2;
            child.weight = w;
            child.accReward = acc;
            child.beliefs.reserve(m_.agentCount());
            for (AgentId i = 0; i < m_.agentCount(); ++i) {
              child.beliefs.push_back(store_.withObservation(postBeliefs[i], e.obs[i]));
            }
            mergeInto(next, index, std::move(child));
          }
        }
      }

      out.perEpochReward[t] = epochReward.value();
      out.perEpochCommReward[t] = epochComm.value();
      total.add(epochReward.value());
      nodes = std::move(next);
      std::sort(nodes.begin(), nodes.end(), nodeLess);
    }

    out.value = total.value();
    out.domainValue = domainTotal.value();
    out.prunedMass = pruned.value();
    return out;
  }

  std::vector<std::vector<TrajectoryNode>> takeEpochs() { return std::move(epochs_); }
  std::vector<FirstKnowledgeEvent> takeEvents() { return std::move(events_); }

 private:
  void mergeInto(std::vector<TrajectoryNode>& nodes,
                 std::unordered_map<NodeKey, std::size_t, NodeKeyHash>& index,
                 TrajectoryNode&& node) {
    NodeKey key{node.state, node.beliefs};
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), nodes.size());
      nodes.push_back(std::move(node));
    } else {
      TrajectoryNode& existing = nodes[it->second];
      // accReward becomes the expected past reward given the merged node,
      // so weighted sums over nodes stay exact.
      existing.accReward =
          (existing.accReward * existing.weight + node.accReward * node.weight) /
          (existing.weight + node.weight);
      existing.weight += node.weight;
    }
  }

  void registerStatesets(const std::vector<TrajectoryNode>& nodes) {
    std::unordered_map<BeliefId, std::vector<StateId>> buckets;
    for (const auto& node : nodes) {
      for (BeliefId b : node.beliefs) {
        if (!ctx_.hasBelief(b)) buckets[b].push_back(node.state);
      }
    }
    registerBuckets(buckets);
  }

  void registerBuckets(std::unordered_map<BeliefId, std::vector<StateId>>& buckets) {
    std::vector<BeliefId> order;
    order.reserve(buckets.size());
    for (auto& [b, states] : buckets) order.push_back(b);
    std::sort(order.begin(), order.end());
    for (BeliefId b : order) {
      auto& states = buckets[b];
      std::sort(states.begin(), states.end());
      states.erase(std::unique(states.begin(), states.end()), states.end());
      ctx_.registerBelief(b, std::move(states));
    }
  }

  MessageId cachedMessage(AgentId i, BeliefId b, int epoch) {
    auto it = messageCache_.find({i, b});
    if (it != messageCache_.end()) return it->second;
    MessageId msg;
    try {
      msg = comm_.chooseMessage(ctx_, i, b);
    } catch (const PolicyUndefinedError&) {
      throw PolicyUndefinedError(m_.agents[i].name, epoch, store_.describe(b));
    }
    if (msg < 0 || msg >= m_.messageCount(i)) {
      throw ContractError("communication policy returned an out-of-range message id");
    }
    messageCache_.emplace(std::make_pair(i, b), msg);
    return msg;
  }

  ActionId cachedAction(AgentId i, BeliefId b, int epoch) {
    auto it = actionCache_.find({i, b});
    if (it != actionCache_.end()) return it->second;
    ActionId a;
    try {
      a = domain_.chooseAction(ctx_, i, b);
    } catch (const PolicyUndefinedError&) {
      throw PolicyUndefinedError(m_.agents[i].name, epoch, store_.describe(b));
    }
    if (a < 0 || a >= static_cast<ActionId>(m_.agents[i].actions.size())) {
      throw ContractError("domain policy returned an out-of-range action id");
    }
    actionCache_.emplace(std::make_pair(i, b), a);
    return a;
  }

  void collectEvents(const std::vector<TrajectoryNode>& nodes, int t) {
    for (const auto& node : nodes) {
      int tG = EvalContext::kNever;
      AgentId kG = -1;
      for (AgentId i = 0; i < m_.agentCount(); ++i) {
        int fk = firstKnowledgeEpochCached(node.beliefs[i]);
        if (fk < tG) {
          tG = fk;
          kG = i;
        }
      }
      if (tG != t) continue;  // no knowledge yet, or it arrived earlier
      BeliefId beta = node.beliefs[kG];
      auto key = std::make_pair(kG, beta);
      auto it = eventIndex_.find(key);
      if (it == eventIndex_.end()) {
        eventIndex_.emplace(key, events_.size());
        events_.push_back(FirstKnowledgeEvent{t, kG, beta, node.weight});
      } else {
        events_[it->second].probability += node.weight;
      }
    }
  }

  int firstKnowledgeEpochCached(BeliefId b) {
    auto it = fkCache_.find(b);
    if (it != fkCache_.end()) return it->second;
    int fk = ctx_.firstKnowledgeEpoch(b, *goal);
    fkCache_.emplace(b, fk);
    return fk;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<std::int32_t, std::int32_t>& p) const {
      return (static_cast<std::size_t>(p.first) << 32) ^ static_cast<std::uint32_t>(p.second);
    }
  };

  const Model& m_;
  BeliefStore& store_;
  const DomainPolicy& domain_;
  const CommPolicy& comm_;
  EvalContext& ctx_;
  EvalOptions opts_;

  std::unordered_map<std::pair<AgentId, BeliefId>, MessageId, PairHash> messageCache_;
  std::unordered_map<std::pair<AgentId, BeliefId>, ActionId, PairHash> actionCache_;
  std::unordered_map<BeliefId, int> fkCache_;

  std::vector<std::vector<TrajectoryNode>> epochs_;
  std::vector<FirstKnowledgeEvent> events_;
  std::unordered_map<std::pair<AgentId, BeliefId>, std::size_t, PairHash> eventIndex_;
};

}  // namespace

Evaluation evaluate(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                    const CommPolicy& comm, const EvalOptions& opts) {
  EvalContext ctx(m, store);
  Enumerator e(m, store, domain, comm, ctx, opts);
  return e.run(e.initialNodes(), 0);
}

ReachResult reach(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                  const CommPolicy& comm, const GoalSet* goal,
                  const std::optional<FirstKnowledgeEvent>& condition,
                  const EvalOptions& opts) {
  ReachResult out;
  out.context = std::make_shared<EvalContext>(m, store);
  Enumerator e(m, store, domain, comm, *out.context, opts);
  e.keepEpochs = true;
  e.goal = goal;
  out.eval = e.run(e.initialNodes(), 0);
  out.epochs = e.takeEpochs();
  out.events = e.takeEvents();

  if (condition) {
    // Keep only nodes matching the event at its epoch and renormalize,
    // then re-run the tail of the process from there.
    std::vector<TrajectoryNode> selected;
    double mass = 0.0;
    for (const auto& node : out.epochs[condition->epoch]) {
      int tG = EvalContext::kNever;
      AgentId kG = -1;
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        int fk = out.context->firstKnowledgeEpoch(node.beliefs[i], *goal);
        if (fk < tG) {
          tG = fk;
          kG = i;
        }
      }
      if (tG == condition->epoch && kG == condition->agent &&
          node.beliefs[kG] == condition->belief) {
        selected.push_back(node);
        mass += node.weight;
      }
    }
    if (selected.empty() || mass <= 0.0) {
      throw ContractError("reach: conditioning event has zero probability");
    }
    for (auto& node : selected) node.weight /= mass;

    Enumerator tail(m, store, domain, comm, *out.context, opts);
    tail.keepEpochs = true;
    tail.run(selected, condition->epoch);
    auto tailEpochs = tail.takeEpochs();
    for (int t = 0; t <= m.horizon; ++t) {
      out.epochs[t] = t < condition->epoch ? std::vector<TrajectoryNode>{}
                                           : std::move(tailEpochs[t]);
    }
  }
  return out;
}

Evaluation evaluateFrom(const Model& m, BeliefStore& store,
                        const std::vector<TrajectoryNode>& startNodes, int startEpoch,
                        const DomainPolicy& domain, const CommPolicy& comm,
                        EvalContext& context, const EvalOptions& opts) {
  Enumerator e(m, store, domain, comm, context, opts);
  return e.run(startNodes, startEpoch);
}

RolloutEstimate rollout(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                        const CommPolicy& comm, int n, std::uint64_t seed) {
  if (n < 1) throw ContractError("rollout: sample count must be >= 1");

  // Exact pass to build the consistent-state sets the policies may consult.
  ReachResult base = reach(m, store, domain, comm);
  EvalContext& ctx = *base.context;

  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };
  auto sampleState = [&](const std::vector<std::pair<StateId, double>>& dist) {
    double u = uniform(), c = 0.0;
    for (const auto& [s, p] : dist) {
      c += p;
      if (u <= c) return s;
    }
    return dist.back().first;
  };
  auto sampleObs = [&](const std::vector<JointObsEntry>& dist) {
    double u = uniform(), c = 0.0;
    for (const auto& e : dist) {
      c += e.p;
      if (u <= c) return e.obs;
    }
    return dist.back().obs;
  };

  const JointActionId nA = m.jointActionCount();
  const JointMessageId nM = m.jointMessageCount();

  KahanAccumulator sum, sumSq;
  for (int episode = 0; episode < n; ++episode) {
    StateId s = sampleState(m.initial);
    std::vector<BeliefId> beliefs(m.agentCount());
    auto obs = sampleObs(m.observationDistribution(s, std::nullopt));
    for (AgentId i = 0; i < m.agentCount(); ++i) {
      beliefs[i] = store.withObservation(store.root(i), obs[i]);
    }

    double reward = 0.0;
    for (int t = 0; t <= m.horizon; ++t) {
      std::vector<MessageId> msgs(m.agentCount());
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        msgs[i] = comm.chooseMessage(ctx, i, beliefs[i]);
      }
      JointMessageId jm = m.packMessage(msgs);
      std::vector<ActionId> acts(m.agentCount());
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        beliefs[i] = store.withMessages(beliefs[i], jm);
        acts[i] = domain.chooseAction(ctx, i, beliefs[i]);
      }
      JointActionId ja = m.packAction(acts);
      reward += m.rewardDomain[static_cast<std::size_t>(s) * nA + ja] +
                m.rewardComm[static_cast<std::size_t>(s) * nM + jm];
      if (t == m.horizon) break;

      const auto& successors = m.transition[static_cast<std::size_t>(s) * nA + ja];
      s = sampleState(successors);
      obs = sampleObs(m.observationDistribution(s, ja));
      for (AgentId i = 0; i < m.agentCount(); ++i) {
        beliefs[i] = store.withObservation(beliefs[i], obs[i]);
      }
    }
    sum.add(reward);
    sumSq.add(reward * reward);
  }

  RolloutEstimate est;
  est.samples = n;
  est.mean = sum.value() / n;
  double variance = std::max(0.0, sumSq.value() / n - est.mean * est.mean);
  if (n > 1) variance = variance * n / (n - 1);
  est.stderror = std::sqrt(variance / n);
  return est;
}

double expectedMessages(const Model& m, BeliefStore& store, const DomainPolicy& domain,
                        const CommPolicy& comm, const std::string& symbol) {
  Evaluation eval = evaluate(m, store, domain, comm);
  double total = 0.0;
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    const auto& msgs = m.agents[i].messages;
    for (MessageId msg = 1; msg < m.messageCount(i); ++msg) {
      if (msgs[msg - 1] == symbol) total += eval.expectedMessageCounts[i][msg];
    }
  }
  return total;
}

}  // namespace comtdp
