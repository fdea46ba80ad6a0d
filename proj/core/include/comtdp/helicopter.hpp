#pragma once

#include <string>
#include <vector>

#include "comtdp/model.hpp"
#include "comtdp/policy.hpp"

namespace comtdp {

/**
 * @brief The two-helicopter escort benchmark.
 *
 * An escort and a transport fly a straight line toward a destination. An
 * enemy radar sits at a uniformly random integer position in 1..8. The
 * escort always flies at full speed and can destroy the radar when
 * co-located with it. The transport either creeps below radar coverage at
 * half speed or flies at full speed, which is fatal while the radar is
 * alive. Destroying the radar is the joint goal; the escort may announce
 * it with a single message whose cost and observability are the two swept
 * parameters.
 */
struct HelicopterParams {
  double lambda = 0.5;  // observability of the destruction, in [0, 1]
  double rSigma = 0.0;  // communication cost, in [0, 1]
  double rE = 0.1;      // escort's per-epoch reward at the destination
  double rT = 0.1;      // transport's per-epoch reward at the destination
  int horizon = 22;     // >= 20 so the slow route still arrives
};

/// Default miscoordination-cost settings for the two STEAM variants; the
/// calibrate search can replace them.
struct SteamCostConfig {
  double cMtLow = 0.5;
  double cMtMedium = 1.5;
};

enum class SteamLevel { kLow, kMedium };

inline constexpr const char* kSigmaGoalMessage = "clear";

Model buildHelicopter(const HelicopterParams& p);

/// States where the radar is destroyed (the joint goal announced by the
/// escort's "clear" message).
GoalSet radarDestroyedGoal(const Model& m);

/// The fixed scripted domain policy: the escort flies, destroys the radar
/// on sight, and then continues; the transport creeps until its belief
/// implies the radar is gone (own observation or the escort's message),
/// then flies at full speed.
DomainPolicyPtr scenarioDomainPolicy(const Model& m);

/// Maps the sweep cell to STEAM parameters: tau = 1 - lambda, cC = rSigma,
/// cMt = the configured constant for the level.
SteamParams steamParamsFor(double lambda, double rSigma, SteamLevel level,
                           const SteamCostConfig& config = {});

// ---- helicopter model introspection helpers -----------------------------

/// Agent indices in the benchmark model.
inline constexpr AgentId kEscort = 0;
inline constexpr AgentId kTransport = 1;

/// Decodes a helicopter observation symbol into its components.
struct HeliObs {
  int escortPos;    // index into the escort position feature
  int transportPos; // index into the transport position feature
  int radarSignal;  // 0 = null, 1 = present (escort only), 2 = destroyed
};
HeliObs decodeObservation(const Model& m, AgentId agent, ObsId obs);

// ---- calibration ---------------------------------------------------------

/// The published summary statistics a calibrated sweep should reproduce.
struct CalibrationTargets {
  double silentMax = 0.700;
  double jenningsMax = 1.000;
  double steamMaxLow = 0.587;
  double steamMaxMedium = 0.587;
  double steamMeanLow = 0.063;
  double steamMeanMedium = 0.083;
  double silentMean = 0.160;
  double jenningsMean = 0.161;
  double globalGapMean = 0.011;
  double globalGapStd = 0.027;
  double globalGapMax = 0.120;
  double statTolerance = 0.05;
  double gapTolerance = 0.03;
};

struct CalibrationResult {
  HelicopterParams params;       // rE/rT/horizon defaults (lambda/rSigma unused)
  SteamCostConfig steam;
  double objective = 0.0;        // sum of squared tolerance-normalized residuals
  std::vector<std::string> residualReport;  // one line per target statistic
};

/// Grid-searches (rT, horizon, cMt-low, cMt-medium) against the targets by
/// running exact sweeps, and reports the residual of every statistic.
/// `searchGlobal` also fits the local-vs-global gap statistics (slower).
CalibrationResult calibrate(const CalibrationTargets& targets = {}, bool searchGlobal = true,
                            int threads = 0);

}  // namespace comtdp
