#include "comtdp/belief.hpp"

#include <algorithm>

namespace comtdp {

BeliefStore::BeliefStore(int agentCount) {
  roots_.reserve(agentCount);
  for (AgentId i = 0; i < agentCount; ++i) {
    nodes_.push_back(Node{kNoBelief, Kind::kRoot, i, 0, 0});
    roots_.push_back(static_cast<BeliefId>(nodes_.size()) - 1);
  }
}

BeliefId BeliefStore::intern(const Key& key, AgentId owner, std::int32_t length) {
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  nodes_.push_back(Node{key.parent, key.kind, owner, key.value, length});
  BeliefId id = static_cast<BeliefId>(nodes_.size()) - 1;
  index_.emplace(key, id);
  return id;
}

BeliefId BeliefStore::withObservation(BeliefId b, ObsId obs) {
  const Node& n = nodes_[b];
  if (n.kind == Kind::kPreComm) {
    throw ContractError("withObservation: belief already has a pending message slot");
  }
  return intern(Key{b, Kind::kPreComm, obs}, n.owner, n.length + 1);
}

BeliefId BeliefStore::withMessages(BeliefId b, JointMessageId msg) {
  const Node& n = nodes_[b];
  if (n.kind != Kind::kPreComm) {
    throw ContractError("withMessages: belief has no pending message slot");
  }
  return intern(Key{b, Kind::kPostComm, msg}, n.owner, n.length);
}

ObsId BeliefStore::lastObservation(BeliefId b) const {
  const Node& n = nodes_[b];
  if (n.kind == Kind::kPreComm) return n.value;
  if (n.kind == Kind::kPostComm) return nodes_[n.parent].value;
  throw ContractError("lastObservation: root belief has no observations");
}

std::vector<ObsId> BeliefStore::observationHistory(BeliefId b) const {
  std::vector<ObsId> out;
  for (BeliefId cur = b; cur != kNoBelief; cur = nodes_[cur].parent) {
    if (nodes_[cur].kind == Kind::kPreComm) out.push_back(nodes_[cur].value);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<JointMessageId> BeliefStore::messageHistory(BeliefId b) const {
  std::vector<JointMessageId> out;
  for (BeliefId cur = b; cur != kNoBelief; cur = nodes_[cur].parent) {
    if (nodes_[cur].kind == Kind::kPostComm) out.push_back(nodes_[cur].value);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string BeliefStore::describe(BeliefId b) const {
  std::vector<std::string> items;
  for (BeliefId cur = b; cur != kNoBelief; cur = nodes_[cur].parent) {
    if (nodes_[cur].kind == Kind::kPreComm) {
      items.push_back("o" + std::to_string(nodes_[cur].value));
    } else if (nodes_[cur].kind == Kind::kPostComm) {
      items.push_back("m" + std::to_string(nodes_[cur].value));
    }
  }
  std::reverse(items.begin(), items.end());
  std::string out = "agent" + std::to_string(owner(b)) + "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  if (pendingMessageSlot(b)) out += ",*";
  out += "]";
  return out;
}

}  // namespace comtdp
