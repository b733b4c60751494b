#pragma once

#include <map>
#include <string>
#include <vector>

#include "taskforge/ltl.hpp"

namespace taskforge::models {

/// Weighted transition system abstracting one robot faculty. The motion
/// model is a CapabilityTS whose propositions are region names. Every state
/// must have at least one outgoing transition; weights are nonnegative and
/// defined for exactly the listed transitions.
struct CapabilityTS {
  struct Edge {
    int src;
    int dst;
    double weight;

    friend bool operator==(const Edge&, const Edge&) = default;
  };

  std::string name;
  std::vector<std::string> props;
  std::vector<std::string> state_names;
  int initial = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<std::string>> labels;  // per state, subset of props

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  int state_index(const std::string& state_name) const;  // -1 if unknown
  std::vector<std::vector<Edge>> out_edges() const;

  friend bool operator==(const CapabilityTS&, const CapabilityTS&) = default;
};

/// Synchronous product of a motion model and capabilities: composite states
/// are positional tuples, a composite transition exists iff every component
/// transition exists, weights add, labels union.
class RobotModel {
 public:
  struct Edge {
    int dst;
    double weight;
  };

  RobotModel() = default;

  int robot_id() const { return robot_id_; }
  int num_states() const { return num_states_; }
  int initial() const { return initial_; }
  const std::vector<std::string>& props() const { return props_; }
  const std::vector<CapabilityTS>& components() const { return components_; }

  const std::vector<int>& state_tuple(int state) const;
  const std::vector<std::string>& label(int state) const;
  const std::vector<Edge>& out(int state) const;
  std::size_t num_transitions() const { return num_transitions_; }

  /// Composite state id for a tuple of component state indices.
  int state_of_tuple(const std::vector<int>& tuple) const;

  /// Human-readable "(room_2, idle, idle)" form.
  std::string state_name(int state) const;

  /// Copy of this model starting from a different composite state.
  RobotModel with_initial(int state) const;

  friend RobotModel compose_robot(const CapabilityTS& motion,
                                  const std::vector<CapabilityTS>& capabilities,
                                  int robot_id);

 private:
  int robot_id_ = 0;
  int num_states_ = 0;
  int initial_ = 0;
  std::size_t num_transitions_ = 0;
  std::vector<CapabilityTS> components_;
  std::vector<int> strides_;
  std::vector<std::string> props_;
  std::vector<std::vector<int>> tuples_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<std::vector<Edge>> out_;
};

/// Throws std::invalid_argument if a proposition appears in two components
/// (ambiguous labeling) or a component is invalid.
RobotModel compose_robot(const CapabilityTS& motion,
                         const std::vector<CapabilityTS>& capabilities,
                         int robot_id);

}  // namespace taskforge::models
