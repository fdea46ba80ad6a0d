#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "comtdp/types.hpp"

namespace comtdp {

/**
 * @brief Interned perfect-recall belief states.
 *
 * A belief is an agent's full history of (own observation, joint message)
 * epochs. Histories are stored as a persistent tree: every belief is a node
 * pointing at its one-step-shorter prefix, and structurally equal histories
 * intern to the same id, so policy tables and trajectory merging can key on
 * ids. Nodes are never mutated or removed; all operations are pure.
 *
 * A pre-communication belief ends in a pending observation whose message
 * slot has not been filled yet; appending the epoch's joint message turns
 * it into a post-communication belief.
 */
class BeliefStore {
 public:
  enum class Kind : std::uint8_t { kRoot, kPreComm, kPostComm };

  explicit BeliefStore(int agentCount);

  /// The empty history for an agent (its prior, before any observation).
  BeliefId root(AgentId agent) const { return roots_[agent]; }

  /// Appends an observation, opening a new epoch with a pending message
  /// slot. The input must not already have a pending slot.
  BeliefId withObservation(BeliefId b, ObsId obs);

  /// Fills the pending message slot with the epoch's joint message.
  /// The input must have a pending slot.
  BeliefId withMessages(BeliefId b, JointMessageId msg);

  Kind kind(BeliefId b) const { return nodes_[b].kind; }
  bool pendingMessageSlot(BeliefId b) const { return nodes_[b].kind == Kind::kPreComm; }

  /// Number of opened epochs (observations seen); the root has length 0.
  int length(BeliefId b) const { return nodes_[b].length; }

  /// Epoch index of the newest element: a belief of length L lives at
  /// epoch L-1.
  int epoch(BeliefId b) const { return nodes_[b].length - 1; }

  AgentId owner(BeliefId b) const { return nodes_[b].owner; }
  BeliefId parent(BeliefId b) const { return nodes_[b].parent; }

  /// Latest own observation (valid for non-root beliefs).
  ObsId lastObservation(BeliefId b) const;
  /// Joint message of the newest closed epoch (valid for post-comm beliefs).
  JointMessageId lastMessage(BeliefId b) const { return nodes_[b].value; }

  /// Own observations in epoch order.
  std::vector<ObsId> observationHistory(BeliefId b) const;
  /// Joint messages of closed epochs in epoch order.
  std::vector<JointMessageId> messageHistory(BeliefId b) const;

  std::string describe(BeliefId b) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    BeliefId parent;
    Kind kind;
    AgentId owner;
    std::int32_t value;  // obs id (kPreComm) or joint message id (kPostComm)
    std::int32_t length;
  };

  struct Key {
    BeliefId parent;
    Kind kind;
    std::int32_t value;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = static_cast<std::size_t>(k.parent) * 0x9e3779b97f4a7c15ull;
      h ^= static_cast<std::size_t>(k.kind) + 0x9e3779b9 + (h << 6) + (h >> 2);
      h ^= static_cast<std::size_t>(k.value) + 0x9e3779b9 + (h << 6) + (h >> 2);
      return h;
    }
  };

  BeliefId intern(const Key& key, AgentId owner, std::int32_t length);

  std::vector<Node> nodes_;
  std::vector<BeliefId> roots_;
  std::unordered_map<Key, BeliefId, KeyHash> index_;
};

}  // namespace comtdp
