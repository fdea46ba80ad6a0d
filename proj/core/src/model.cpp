#include "comtdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "comtdp/numeric.hpp"

namespace comtdp {

std::string ValidationReport::summary() const {
  if (issues.empty()) return "pass";
  std::string out = std::to_string(issues.size()) + " violation(s)\n";
  for (const auto& v : issues) {
    out += "  [" + v.table + "] " + v.key + ": " + v.message + "\n";
  }
  return out;
}

std::string toString(Observability o) {
  switch (o) {
    case Observability::kIndividuallyObservable: return "individually-observable";
    case Observability::kCollectivelyObservable: return "collectively-observable";
    case Observability::kCollectivelyPartiallyObservable:
      return "collectively-partially-observable";
    case Observability::kNonObservable: return "non-observable";
  }
  return "?";
}

std::string toString(CommCost c) {
  switch (c) {
    case CommCost::kFree: return "free";
    case CommCost::kNone: return "none";
    case CommCost::kGeneral: return "general";
  }
  return "?";
}

StateId Model::stateCount() const {
  long long n = 1;
  for (const auto& f : features) n *= static_cast<long long>(f.values.size());
  return static_cast<StateId>(n);
}

JointActionId Model::jointActionCount() const {
  long long n = 1;
  for (const auto& a : agents) n *= static_cast<long long>(a.actions.size());
  return static_cast<JointActionId>(n);
}

JointMessageId Model::jointMessageCount() const {
  long long n = 1;
  for (const auto& a : agents) n *= static_cast<long long>(a.messages.size()) + 1;
  return static_cast<JointMessageId>(n);
}

StateId Model::packState(const std::vector<int>& featureValues) const {
  StateId s = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    s = s * static_cast<StateId>(features[i].values.size()) + featureValues[i];
  }
  return s;
}

std::vector<int> Model::unpackState(StateId s) const {
  std::vector<int> out(features.size());
  for (std::size_t i = features.size(); i-- > 0;) {
    int n = static_cast<int>(features[i].values.size());
    out[i] = s % n;
    s /= n;
  }
  return out;
}

int Model::featureValue(StateId s, int feature) const {
  for (std::size_t i = features.size(); i-- > 0;) {
    int n = static_cast<int>(features[i].values.size());
    int v = s % n;
    if (static_cast<int>(i) == feature) return v;
    s /= n;
  }
  throw ContractError("featureValue: bad feature index");
}

JointActionId Model::packAction(const std::vector<ActionId>& perAgent) const {
  JointActionId a = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    a = a * static_cast<JointActionId>(agents[i].actions.size()) + perAgent[i];
  }
  return a;
}

std::vector<ActionId> Model::unpackAction(JointActionId a) const {
  std::vector<ActionId> out(agents.size());
  for (std::size_t i = agents.size(); i-- > 0;) {
    int n = static_cast<int>(agents[i].actions.size());
    out[i] = a % n;
    a /= n;
  }
  return out;
}

ActionId Model::agentAction(JointActionId a, AgentId agent) const {
  for (std::size_t i = agents.size(); i-- > 0;) {
    int n = static_cast<int>(agents[i].actions.size());
    ActionId v = a % n;
    if (static_cast<AgentId>(i) == agent) return v;
    a /= n;
  }
  throw ContractError("agentAction: bad agent index");
}

JointMessageId Model::packMessage(const std::vector<MessageId>& perAgent) const {
  JointMessageId m = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    m = m * static_cast<JointMessageId>(messageCount(static_cast<AgentId>(i))) + perAgent[i];
  }
  return m;
}

std::vector<MessageId> Model::unpackMessage(JointMessageId m) const {
  std::vector<MessageId> out(agents.size());
  for (std::size_t i = agents.size(); i-- > 0;) {
    int n = messageCount(static_cast<AgentId>(i));
    out[i] = m % n;
    m /= n;
  }
  return out;
}

MessageId Model::agentMessage(JointMessageId m, AgentId agent) const {
  for (std::size_t i = agents.size(); i-- > 0;) {
    int n = messageCount(static_cast<AgentId>(i));
    MessageId v = m % n;
    if (static_cast<AgentId>(i) == agent) return v;
    m /= n;
  }
  throw ContractError("agentMessage: bad agent index");
}

std::size_t Model::obsKey(StateId s, std::optional<JointActionId> prev) const {
  std::size_t stride = static_cast<std::size_t>(jointActionCount()) + 1;
  std::size_t key = prev ? static_cast<std::size_t>(*prev) + 1 : 0;
  return static_cast<std::size_t>(s) * stride + key;
}

std::vector<JointObsEntry> Model::observationDistribution(
    StateId s, std::optional<JointActionId> prev) const {
  std::vector<JointObsEntry> out;
  std::size_t key = obsKey(s, prev);
  if (!factoredObservations()) {
    for (const auto& e : obsJoint[key]) {
      if (e.p > 0.0) out.push_back(e);
    }
    return out;
  }
  // Cartesian product over per-agent supports.
  out.push_back(JointObsEntry{{}, 1.0});
  for (int i = 0; i < agentCount(); ++i) {
    std::vector<JointObsEntry> next;
    for (const auto& base : out) {
      for (const auto& [obs, p] : obsFactored[i][key]) {
        if (p <= 0.0) continue;
        JointObsEntry e = base;
        e.obs.push_back(obs);
        e.p *= p;
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

int Model::featureIndex(const std::string& name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return static_cast<int>(i);
  }
  throw ContractError("unknown feature: " + name);
}

int Model::featureValueIndex(int feature, const std::string& value) const {
  const auto& vals = features[feature].values;
  auto it = std::find(vals.begin(), vals.end(), value);
  if (it == vals.end()) {
    throw ContractError("unknown value '" + value + "' for feature " + features[feature].name);
  }
  return static_cast<int>(it - vals.begin());
}

AgentId Model::agentIndex(const std::string& name) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].name == name) return static_cast<AgentId>(i);
  }
  throw ContractError("unknown agent: " + name);
}

ActionId Model::actionIndex(AgentId i, const std::string& name) const {
  const auto& v = agents[i].actions;
  auto it = std::find(v.begin(), v.end(), name);
  if (it == v.end()) throw ContractError("unknown action '" + name + "' for " + agents[i].name);
  return static_cast<ActionId>(it - v.begin());
}

MessageId Model::messageIndex(AgentId i, const std::string& name) const {
  if (name == "null") return kNullMessage;
  const auto& v = agents[i].messages;
  auto it = std::find(v.begin(), v.end(), name);
  if (it == v.end()) throw ContractError("unknown message '" + name + "' for " + agents[i].name);
  return static_cast<MessageId>(it - v.begin()) + 1;
}

ObsId Model::observationIndex(AgentId i, const std::string& name) const {
  const auto& v = agents[i].observations;
  auto it = std::find(v.begin(), v.end(), name);
  if (it == v.end()) {
    throw ContractError("unknown observation '" + name + "' for " + agents[i].name);
  }
  return static_cast<ObsId>(it - v.begin());
}

std::string Model::stateName(StateId s) const {
  auto vals = unpackState(s);
  std::string out = "(";
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i) out += ",";
    out += features[i].values[vals[i]];
  }
  return out + ")";
}

std::string Model::jointActionName(JointActionId a) const {
  auto vals = unpackAction(a);
  std::string out = "(";
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i) out += ",";
    out += agents[i].actions[vals[i]];
  }
  return out + ")";
}

std::string Model::jointMessageName(JointMessageId m) const {
  auto vals = unpackMessage(m);
  std::string out = "(";
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i) out += ",";
    out += vals[i] == kNullMessage ? "null" : agents[i].messages[vals[i] - 1];
  }
  return out + ")";
}

namespace {

void checkDistribution(const std::vector<std::pair<StateId, double>>& row,
                       const std::string& table, const std::string& key,
                       ValidationReport& report) {
  KahanAccumulator sum;
  for (const auto& [s, p] : row) {
    if (p < 0.0 || p > 1.0) {
      report.issues.push_back({table, key, "probability outside [0,1]"});
    }
    sum.add(p);
  }
  if (std::abs(sum.value() - 1.0) > kProbabilityTolerance) {
    report.issues.push_back(
        {table, key, "row not normalized (sum=" + formatValue(sum.value()) + ")"});
  }
}

}  // namespace

ValidationReport validate(const Model& m) {
  ValidationReport report;
  const StateId nS = m.stateCount();
  const JointActionId nA = m.jointActionCount();
  const JointMessageId nM = m.jointMessageCount();

  if (m.horizon < 0) {
    report.issues.push_back({"horizon", "", "horizon must be non-negative"});
  }

  // Transition rows.
  for (StateId s = 0; s < nS; ++s) {
    for (JointActionId a = 0; a < nA; ++a) {
      const auto& row = m.transition[static_cast<std::size_t>(s) * nA + a];
      std::string key = m.stateName(s) + "," + m.jointActionName(a);
      if (row.empty()) {
        report.issues.push_back({"transition", key, "transition row not normalized (empty)"});
        continue;
      }
      checkDistribution(row, "transition", key, report);
      for (const auto& [s2, p] : row) {
        if (s2 < 0 || s2 >= nS) {
          report.issues.push_back({"transition", key, "successor state out of range"});
        }
      }
    }
  }

  // Observation rows, keyed by previous action including the null action.
  auto checkObsRow = [&](StateId s, std::optional<JointActionId> prev) {
    std::string key =
        m.stateName(s) + "," + (prev ? m.jointActionName(*prev) : std::string("null-action"));
    std::size_t idx = m.obsKey(s, prev);
    if (m.factoredObservations()) {
      for (int i = 0; i < m.agentCount(); ++i) {
        KahanAccumulator sum;
        for (const auto& [o, p] : m.obsFactored[i][idx]) {
          if (p < 0.0 || p > 1.0) {
            report.issues.push_back(
                {"observation:" + m.agents[i].name, key, "probability outside [0,1]"});
          }
          if (o < 0 || o >= static_cast<ObsId>(m.agents[i].observations.size())) {
            report.issues.push_back(
                {"observation:" + m.agents[i].name, key, "observation index out of range"});
          }
          sum.add(p);
        }
        if (std::abs(sum.value() - 1.0) > kProbabilityTolerance) {
          report.issues.push_back({"observation:" + m.agents[i].name, key,
                                   "observation row not normalized (sum=" +
                                       formatValue(sum.value()) + ")"});
        }
      }
    } else {
      KahanAccumulator sum;
      for (const auto& e : m.obsJoint[idx]) {
        if (e.p < 0.0 || e.p > 1.0) {
          report.issues.push_back({"observation", key, "probability outside [0,1]"});
        }
        sum.add(e.p);
      }
      if (std::abs(sum.value() - 1.0) > kProbabilityTolerance) {
        report.issues.push_back(
            {"observation", key,
             "observation row not normalized (sum=" + formatValue(sum.value()) + ")"});
      }
    }
  };
  for (StateId s = 0; s < nS; ++s) {
    checkObsRow(s, std::nullopt);
    for (JointActionId a = 0; a < nA; ++a) checkObsRow(s, a);
  }

  // Communication rewards: non-positive, zero for the all-null vector.
  for (StateId s = 0; s < nS; ++s) {
    for (JointMessageId mm = 0; mm < nM; ++mm) {
      double r = m.rewardComm[static_cast<std::size_t>(s) * nM + mm];
      std::string key = m.stateName(s) + "," + m.jointMessageName(mm);
      if (r > 0.0) {
        report.issues.push_back(
            {"reward_comm", key, "communication reward must be non-positive"});
      }
      if (mm == 0 && r != 0.0) {
        report.issues.push_back(
            {"reward_comm", key, "null message vector must have zero reward"});
      }
    }
  }

  // Initial distribution.
  {
    KahanAccumulator sum;
    for (const auto& [s, p] : m.initial) {
      if (p < 0.0 || p > 1.0) {
        report.issues.push_back({"initial", m.stateName(s), "probability outside [0,1]"});
      }
      if (s < 0 || s >= nS) {
        report.issues.push_back({"initial", std::to_string(s), "state out of range"});
      }
      sum.add(p);
    }
    if (std::abs(sum.value() - 1.0) > kProbabilityTolerance) {
      report.issues.push_back(
          {"initial", "", "initial distribution not normalized (sum=" +
                              formatValue(sum.value()) + ")"});
    }
  }

  return report;
}

namespace {

// Per-agent marginal observation distribution at (s, prev).
std::vector<double> agentObsMarginal(const Model& m, AgentId i, StateId s,
                                     std::optional<JointActionId> prev) {
  std::vector<double> out(m.agents[i].observations.size(), 0.0);
  std::size_t key = m.obsKey(s, prev);
  if (m.factoredObservations()) {
    for (const auto& [o, p] : m.obsFactored[i][key]) out[o] += p;
  } else {
    for (const auto& e : m.obsJoint[key]) out[e.obs[i]] += e.p;
  }
  return out;
}

bool individuallyObservable(const Model& m) {
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    // pinned[o] = the unique state o may occur in, or -2 if not yet seen.
    std::vector<StateId> pinned(m.agents[i].observations.size(), -2);
    for (StateId s = 0; s < m.stateCount(); ++s) {
      for (int key = 0; key <= m.jointActionCount(); ++key) {
        std::optional<JointActionId> prev =
            key == 0 ? std::nullopt : std::optional<JointActionId>(key - 1);
        auto marg = agentObsMarginal(m, i, s, prev);
        for (ObsId o = 0; o < static_cast<ObsId>(marg.size()); ++o) {
          if (marg[o] <= 0.0) continue;
          if (pinned[o] == -2) {
            pinned[o] = s;
          } else if (pinned[o] != s) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

bool collectivelyObservable(const Model& m) {
  // Key joint observations by their per-agent id vector.
  std::map<std::vector<ObsId>, StateId> pinned;
  for (StateId s = 0; s < m.stateCount(); ++s) {
    for (int key = 0; key <= m.jointActionCount(); ++key) {
      std::optional<JointActionId> prev =
          key == 0 ? std::nullopt : std::optional<JointActionId>(key - 1);
      for (const auto& e : m.observationDistribution(s, prev)) {
        auto [it, inserted] = pinned.emplace(e.obs, s);
        if (!inserted && it->second != s) return false;
      }
    }
  }
  return true;
}

bool nonObservable(const Model& m) {
  // Every agent has some observation it receives with probability one in
  // all states regardless of the previous action.
  for (AgentId i = 0; i < m.agentCount(); ++i) {
    std::size_t nObs = m.agents[i].observations.size();
    std::vector<bool> candidate(nObs, true);
    for (StateId s = 0; s < m.stateCount(); ++s) {
      for (int key = 0; key <= m.jointActionCount(); ++key) {
        std::optional<JointActionId> prev =
            key == 0 ? std::nullopt : std::optional<JointActionId>(key - 1);
        auto marg = agentObsMarginal(m, i, s, prev);
        for (ObsId o = 0; o < static_cast<ObsId>(nObs); ++o) {
          if (marg[o] < 1.0) candidate[o] = false;
        }
      }
    }
    if (std::none_of(candidate.begin(), candidate.end(), [](bool b) { return b; })) {
      return false;
    }
  }
  return true;
}

}  // namespace

Observability classifyObservability(const Model& m) {
  if (nonObservable(m)) return Observability::kNonObservable;
  if (individuallyObservable(m)) return Observability::kIndividuallyObservable;
  if (collectivelyObservable(m)) return Observability::kCollectivelyObservable;
  return Observability::kCollectivelyPartiallyObservable;
}

CommCost classifyCommunication(const Model& m) {
  bool anyMessage = false;
  for (const auto& a : m.agents) anyMessage = anyMessage || !a.messages.empty();
  if (!anyMessage) return CommCost::kNone;
  for (double r : m.rewardComm) {
    if (r != 0.0) return CommCost::kGeneral;
  }
  return CommCost::kFree;
}

}  // namespace comtdp
