#include "comtdp/helicopter.hpp"

#include <algorithm>
#include <cmath>

#include "comtdp/evaluate.hpp"

namespace comtdp {

namespace {

// Feature layout. Positions are encoded as value indices:
//   escort:    0..9 at index 0..9, Destination at 10
//   transport: position idx*0.5 at index 0..19, Destination 20, Destroyed 21
//   radar:     position idx+1 at index 0..7, Destroyed 8
constexpr int kEscortDest = 10;
constexpr int kTransportDest = 20;
constexpr int kTransportDestroyed = 21;
constexpr int kRadarDestroyed = 8;

constexpr int kSignalNull = 0;
constexpr int kSignalPresent = 1;
constexpr int kSignalDestroyed = 2;

std::string halfName(int idx) {
  if (idx % 2 == 0) return std::to_string(idx / 2);
  return std::to_string(idx / 2) + ".5";
}

struct Layout {
  int nE = 11, nT = 22, nR = 9;
  int escortSignals = 3;     // null, present, destroyed
  int transportSignals = 2;  // null, destroyed

  ObsId escortObs(int e, int t, int sig) const { return (e * nT + t) * escortSignals + sig; }
  ObsId transportObs(int e, int t, int sig) const {
    return (e * nT + t) * transportSignals + sig;
  }
};

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

Model buildHelicopter(const HelicopterParams& p) {
  if (p.lambda < 0.0 || p.lambda > 1.0) throw ContractError("helicopter: lambda not in [0,1]");
  if (p.rSigma < 0.0 || p.rSigma > 1.0) throw ContractError("helicopter: rSigma not in [0,1]");
  if (p.rE <= 0.0 || p.rT <= 0.0) throw ContractError("helicopter: rE, rT must be positive");
  if (p.horizon < 20) throw ContractError("helicopter: horizon must be >= 20");

  Layout L;
  Model m;
  m.horizon = p.horizon;

  FeatureDef xiE{"xi_e", {}};
  for (int e = 0; e <= 9; ++e) xiE.values.push_back(std::to_string(e));
  xiE.values.push_back("Destination");

  FeatureDef xiT{"xi_t", {}};
  for (int t = 0; t < 20; ++t) xiT.values.push_back(halfName(t));
  xiT.values.push_back("Destination");
  xiT.values.push_back("Destroyed");

  FeatureDef xiR{"xi_r", {}};
  for (int r = 1; r <= 8; ++r) xiR.values.push_back(std::to_string(r));
  xiR.values.push_back("Destroyed");

  m.features = {xiE, xiT, xiR};

  AgentDef escort{"Escort", {"fly", "destroy", "wait"}, {kSigmaGoalMessage}, {}};
  AgentDef transport{"Transport", {"fly-NOE", "fly-normal", "wait"}, {}, {}};
  static const char* kEscortSignalNames[] = {"null", "present", "destroyed"};
  static const char* kTransportSignalNames[] = {"null", "destroyed"};
  for (int e = 0; e < L.nE; ++e) {
    for (int t = 0; t < L.nT; ++t) {
      for (int sig = 0; sig < L.escortSignals; ++sig) {
        escort.observations.push_back(xiE.values[e] + "|" + xiT.values[t] + "|" +
                                      kEscortSignalNames[sig]);
      }
    }
  }
  for (int e = 0; e < L.nE; ++e) {
    for (int t = 0; t < L.nT; ++t) {
      for (int sig = 0; sig < L.transportSignals; ++sig) {
        transport.observations.push_back(xiE.values[e] + "|" + xiT.values[t] + "|" +
                                         kTransportSignalNames[sig]);
      }
    }
  }
  m.agents = {escort, transport};

  const ActionId aFly = 0, aDestroy = 1, aWaitE = 2;
  const ActionId aNoe = 0, aNormal = 1, aWaitT = 2;

  const StateId nS = m.stateCount();
  const JointActionId nA = m.jointActionCount();
  const JointMessageId nM = m.jointMessageCount();

  auto nextEscort = [&](int e, ActionId a) {
    if (e == kEscortDest || a == aWaitE) return e;
    return e == 9 ? kEscortDest : e + 1;  // fly and destroy both advance
  };
  auto nextTransport = [&](int t, int r, ActionId a) {
    if (t == kTransportDest || t == kTransportDestroyed || a == aWaitT) return t;
    if (a == aNoe) return t == 19 ? kTransportDest : t + 1;
    // fly-normal: fatal under a live radar, otherwise a full step.
    if (r != kRadarDestroyed) return kTransportDestroyed;
    return t >= 18 ? kTransportDest : t + 2;
  };
  auto nextRadar = [&](int e, int r, ActionId a) {
    if (a == aDestroy && r != kRadarDestroyed && e == r + 1) return kRadarDestroyed;
    return r;
  };

  m.transition.resize(static_cast<std::size_t>(nS) * nA);
  m.rewardDomain.resize(static_cast<std::size_t>(nS) * nA);
  m.rewardComm.assign(static_cast<std::size_t>(nS) * nM, 0.0);
  m.obsFactored.assign(2, {});
  m.obsFactored[kEscort].resize(static_cast<std::size_t>(nS) * (nA + 1));
  m.obsFactored[kTransport].resize(static_cast<std::size_t>(nS) * (nA + 1));

  for (int e = 0; e < L.nE; ++e) {
    for (int t = 0; t < L.nT; ++t) {
      for (int r = 0; r < L.nR; ++r) {
        StateId s = m.packState({e, t, r});
        double reward = (e == kEscortDest ? p.rE : 0.0) + (t == kTransportDest ? p.rT : 0.0);

        for (JointActionId ja = 0; ja < nA; ++ja) {
          ActionId aE = m.agentAction(ja, kEscort);
          ActionId aT = m.agentAction(ja, kTransport);
          StateId s2 = m.packState(
              {nextEscort(e, aE), nextTransport(t, r, aT), nextRadar(e, r, aE)});
          m.transition[static_cast<std::size_t>(s) * nA + ja] = {{s2, 1.0}};
          m.rewardDomain[static_cast<std::size_t>(s) * nA + ja] = reward;
        }

        // The escort's only costed message is the goal announcement.
        JointMessageId announce = m.packMessage({1, 0});
        m.rewardComm[static_cast<std::size_t>(s) * nM + announce] = -p.rSigma;

        // Observations depend on the previous escort action only.
        for (int key = 0; key <= nA; ++key) {
          bool afterDestroy = false;
          if (key > 0) afterDestroy = m.agentAction(key - 1, kEscort) == aDestroy;
          std::size_t idx = m.obsKey(s, key == 0 ? std::nullopt
                                                 : std::optional<JointActionId>(key - 1));

          int escortSig = kSignalNull;
          if (r == kRadarDestroyed) {
            escortSig = afterDestroy ? kSignalDestroyed : kSignalNull;
          } else if (e == r + 1) {
            escortSig = kSignalPresent;
          }
          m.obsFactored[kEscort][idx] = {{L.escortObs(e, t, escortSig), 1.0}};

          auto& rowT = m.obsFactored[kTransport][idx];
          if (t <= 19 && afterDestroy) {
            // Distance term of the detection model. Once the radar feature
            // reads Destroyed its old position is the escort's previous one.
            double radarRef = r != kRadarDestroyed ? r + 1 : (e == kEscortDest ? 10 : e) - 1;
            double pos = t * 0.5;
            double pd = clamp01(p.lambda * std::exp(-(radarRef - pos) * (1.0 - p.lambda)));
            rowT.clear();
            if (pd > 0.0) rowT.push_back({L.transportObs(e, t, 1), pd});
            if (pd < 1.0) rowT.push_back({L.transportObs(e, t, 0), 1.0 - pd});
          } else {
            rowT = {{L.transportObs(e, t, 0), 1.0}};
          }
        }
      }
    }
  }

  StateId e0 = 0, t0 = 0;
  for (int r = 0; r < 8; ++r) {
    m.initial.push_back({m.packState({e0, t0, r}), 0.125});
  }
  return m;
}

GoalSet radarDestroyedGoal(const Model& m) {
  int xiR = m.featureIndex("xi_r");
  return makeGoal(m, "radar-destroyed",
                  [&](StateId s) { return m.featureValue(s, xiR) == kRadarDestroyed; });
}

HeliObs decodeObservation(const Model& m, AgentId agent, ObsId obs) {
  Layout L;
  HeliObs out{};
  if (agent == kEscort) {
    out.radarSignal = obs % L.escortSignals;
    out.transportPos = (obs / L.escortSignals) % L.nT;
    out.escortPos = obs / (L.escortSignals * L.nT);
  } else {
    int sig = obs % L.transportSignals;
    out.radarSignal = sig == 0 ? kSignalNull : kSignalDestroyed;
    out.transportPos = (obs / L.transportSignals) % L.nT;
    out.escortPos = obs / (L.transportSignals * L.nT);
  }
  (void)m;
  return out;
}

namespace {

/// The scripted scenario behavior; pure inspection of the agent's own
/// history (observations and received messages), no reachability queries.
class ScenarioPolicy : public DomainPolicy {
 public:
  explicit ScenarioPolicy(const Model& m) : model_(&m) {}

  ActionId chooseAction(const EvalContext& ctx, AgentId agent,
                        BeliefId belief) const override;

 private:
  bool transportBelievesRadarGone(const BeliefStore& store, BeliefId belief) const {
    for (BeliefId cur = belief; cur != kNoBelief; cur = store.parent(cur)) {
      if (store.kind(cur) == BeliefStore::Kind::kPreComm) {
        HeliObs o = decodeObservation(*model_, kTransport, store.lastObservation(cur));
        if (o.radarSignal == kSignalDestroyed) return true;
      } else if (store.kind(cur) == BeliefStore::Kind::kPostComm) {
        if (model_->agentMessage(store.lastMessage(cur), kEscort) != kNullMessage) return true;
      }
    }
    return false;
  }

  const Model* model_;
};

ActionId ScenarioPolicy::chooseAction(const EvalContext& ctx, AgentId agent,
                                      BeliefId belief) const {
  const BeliefStore& store = ctx.store();
  HeliObs o = decodeObservation(*model_, agent, store.lastObservation(belief));
  if (agent == kEscort) {
    if (o.escortPos == kEscortDest) return 2;          // wait
    if (o.radarSignal == kSignalPresent) return 1;     // destroy
    return 0;                                          // fly
  }
  if (o.transportPos == kTransportDest || o.transportPos == kTransportDestroyed) {
    return 2;  // wait
  }
  return transportBelievesRadarGone(store, belief) ? 1 : 0;  // fly-normal : fly-NOE
}

}  // namespace

DomainPolicyPtr scenarioDomainPolicy(const Model& m) {
  return std::make_shared<ScenarioPolicy>(m);
}

SteamParams steamParamsFor(double lambda, double rSigma, SteamLevel level,
                           const SteamCostConfig& config) {
  SteamParams params;
  params.tau = 1.0 - lambda;
  params.cC = rSigma;
  params.cMt = level == SteamLevel::kLow ? config.cMtLow : config.cMtMedium;
  return params;
}

}  // namespace comtdp
