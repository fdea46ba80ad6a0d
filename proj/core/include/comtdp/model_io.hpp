#pragma once

#include <stdexcept>
#include <string>

#include "comtdp/model.hpp"

namespace comtdp {

class ModelParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * @brief Text model format.
 *
 * A model file is a sequence of named sections. Tables mirror the paper
 * style of factored rows: a header names the columns a table depends on,
 * and each row lists input values, "->", output values, and (for
 * probability tables) a probability. The "." token is a wildcard matching
 * any value; in action columns "-" matches only the initial epoch's
 * reserved null action. Row order matters only for wildcard shadowing:
 * the first matching row wins.
 *
 *   [features]
 *   coin = heads tails
 *   [agents]
 *   alice bob
 *   [actions]
 *   alice = flip wait
 *   bob = wait
 *   [messages]
 *   alice = done
 *   bob =
 *   [observations]
 *   alice = heads tails none
 *   bob = none
 *   [transition]
 *   table coin given coin action:alice
 *   . flip -> heads 0.5
 *   . flip -> tails 0.5
 *   heads wait -> heads 1
 *   tails wait -> tails 1
 *   [observation]
 *   table alice given coin action:alice
 *   heads flip -> heads 1
 *   ...
 *   [reward_domain]
 *   given coin action:alice
 *   heads . -> 1
 *   [reward_comm]
 *   given message:alice
 *   done -> -0.1
 *   [initial]
 *   feature coin heads 0.5
 *   feature coin tails 0.5
 *   [horizon]
 *   3
 *
 * Transition tables are either one `table <feature> ...` block per feature
 * (their product defines the joint transition) or a single
 * `table joint ...` block whose outputs list every feature's next value.
 * Observation tables are per agent or joint in the same way. A missing
 * reward row means reward zero. The initial section uses per-feature
 * `feature` rows (product form) or `joint` rows over all features.
 */
Model parseModel(const std::string& text);
Model loadModel(const std::string& path);

std::string serializeModel(const Model& m);
void saveModel(const Model& m, const std::string& path);

}  // namespace comtdp
