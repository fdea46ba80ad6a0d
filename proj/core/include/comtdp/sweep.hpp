#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "comtdp/helicopter.hpp"
#include "comtdp/model.hpp"

namespace comtdp {

/**
 * @brief The 11x11 benchmark sweep over observability and message cost.
 *
 * Every grid cell evaluates the configured policy descriptors exactly and
 * records value, expected message count, and suboptimality against the
 * locally and globally optimal communication policies. Cells run on a
 * worker pool but are merged in grid order, and all accumulation is
 * compensated, so outputs are byte-identical across reruns and thread
 * counts.
 */
struct SweepConfig {
  HelicopterParams base;  // lambda/rSigma are overwritten per cell
  SteamCostConfig steam;
  int window = 2;
  int maxDecisionPoints = 20;
  int threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 20020417;
  std::vector<std::string> policies = {"silent",       "jennings",  "steam:low",
                                       "steam:medium", "local-opt", "global-opt"};

  bool wantsPolicy(const std::string& name) const;
};

struct CellResult {
  double lambda = 0.0;
  double rSigma = 0.0;
  std::map<std::string, double> value;     // per policy descriptor
  std::map<std::string, double> messages;  // expected sends per descriptor
  bool globalSkipped = false;              // search budget exceeded
  double seconds = 0.0;
};

struct SweepStats {
  std::map<std::string, double> maxSubopt;   // vs local-opt
  std::map<std::string, double> meanSubopt;  // vs local-opt
  double gapMean = 0.0;                      // global minus local
  double gapStd = 0.0;                       // population standard deviation
  double gapMax = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<CellResult> cells;  // row-major: lambda outer, rSigma inner
  SweepStats stats;
  double totalSeconds = 0.0;
};

SweepResult runSweep(const SweepConfig& config);

/// Writes values.csv, messages.csv, subopt_vs_local.csv,
/// subopt_vs_global.csv, stats.txt and manifest.txt (all deterministic)
/// plus timing.txt into `outDir`.
void writeSweepOutputs(const SweepResult& result, const std::string& outDir);

/// Plain `key = value` config text; unknown keys are an error. The
/// `policies` key takes a comma-separated descriptor list.
SweepConfig loadSweepConfig(const std::string& path);
std::string serializeSweepConfig(const SweepConfig& config);

/// Reads a sweep output directory and writes the comparison report:
/// report.txt plus gnuplot-style surface and curve data files. Returns a
/// short human-readable summary. Missing inputs throw.
std::string writeReport(const std::string& resultDir, const std::string& outDir);

}  // namespace comtdp
