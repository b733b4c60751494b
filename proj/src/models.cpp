#include "taskforge/models.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace taskforge::models {

void CapabilityTS::validate() const {
  if (state_names.empty())
    throw std::invalid_argument("capability '" + name + "' has no states");
  if (initial < 0 || initial >= static_cast<int>(state_names.size()))
    throw std::invalid_argument("capability '" + name +
                                "': initial state out of range");
  if (labels.size() != state_names.size())
    throw std::invalid_argument("capability '" + name +
                                "': labels/state count mismatch");
  {
    std::set<std::string> seen(state_names.begin(), state_names.end());
    if (seen.size() != state_names.size())
      throw std::invalid_argument("capability '" + name +
                                  "': duplicate state name");
  }
  const std::set<std::string> prop_set(props.begin(), props.end());
  for (std::size_t s = 0; s < labels.size(); ++s) {
    for (const std::string& p : labels[s]) {
      if (!prop_set.count(p))
        throw std::invalid_argument("capability '" + name + "': state '" +
                                    state_names[s] + "' labeled with unknown '" +
                                    p + "'");
    }
  }
  std::vector<char> has_out(state_names.size(), 0);
  std::set<std::pair<int, int>> seen_edges;
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= static_cast<int>(state_names.size()) ||
        e.dst < 0 || e.dst >= static_cast<int>(state_names.size()))
      throw std::invalid_argument("capability '" + name +
                                  "': edge endpoint out of range");
    if (e.weight < 0)
      throw std::invalid_argument("capability '" + name +
                                  "': negative edge weight");
    if (!seen_edges.emplace(e.src, e.dst).second)
      throw std::invalid_argument("capability '" + name +
                                  "': duplicate edge " + state_names[e.src] +
                                  " -> " + state_names[e.dst]);
    has_out[e.src] = 1;
  }
  for (std::size_t s = 0; s < has_out.size(); ++s) {
    if (!has_out[s])
      throw std::invalid_argument("capability '" + name + "': state '" +
                                  state_names[s] +
                                  "' has no outgoing transition");
  }
}

int CapabilityTS::state_index(const std::string& state_name) const {
  for (std::size_t i = 0; i < state_names.size(); ++i)
    if (state_names[i] == state_name) return static_cast<int>(i);
  return -1;
}

std::vector<std::vector<CapabilityTS::Edge>> CapabilityTS::out_edges() const {
  std::vector<std::vector<Edge>> out(state_names.size());
  for (const Edge& e : edges) out[e.src].push_back(e);
  for (auto& lst : out)
    std::sort(lst.begin(), lst.end(),
              [](const Edge& a, const Edge& b) { return a.dst < b.dst; });
  return out;
}

const std::vector<int>& RobotModel::state_tuple(int state) const {
  return tuples_.at(state);
}

const std::vector<std::string>& RobotModel::label(int state) const {
  return labels_.at(state);
}

const std::vector<RobotModel::Edge>& RobotModel::out(int state) const {
  return out_.at(state);
}

int RobotModel::state_of_tuple(const std::vector<int>& tuple) const {
  if (tuple.size() != components_.size())
    throw std::invalid_argument("tuple arity mismatch");
  int id = 0;
  for (std::size_t c = 0; c < tuple.size(); ++c) {
    const int n = static_cast<int>(components_[c].state_names.size());
    if (tuple[c] < 0 || tuple[c] >= n)
      throw std::invalid_argument("tuple component out of range");
    id += tuple[c] * strides_[c];
  }
  return id;
}

std::string RobotModel::state_name(int state) const {
  const std::vector<int>& tuple = state_tuple(state);
  std::string out = "(";
  for (std::size_t c = 0; c < tuple.size(); ++c) {
    if (c) out += ", ";
    out += components_[c].state_names[tuple[c]];
  }
  out += ")";
  return out;
}

RobotModel RobotModel::with_initial(int state) const {
  if (state < 0 || state >= num_states_)
    throw std::invalid_argument("with_initial: state out of range");
  RobotModel copy = *this;
  copy.initial_ = state;
  return copy;
}

RobotModel compose_robot(const CapabilityTS& motion,
                         const std::vector<CapabilityTS>& capabilities,
                         int robot_id) {
  RobotModel m;
  m.robot_id_ = robot_id;
  m.components_.push_back(motion);
  for (const CapabilityTS& c : capabilities) m.components_.push_back(c);

  std::set<std::string> all_props;
  for (const CapabilityTS& c : m.components_) {
    c.validate();
    for (const std::string& p : c.props) {
      if (!all_props.insert(p).second)
        throw std::invalid_argument("proposition '" + p +
                                    "' appears in two components");
    }
  }
  m.props_.assign(all_props.begin(), all_props.end());

  const std::size_t num_components = m.components_.size();
  m.strides_.assign(num_components, 1);
  long long total = 1;
  for (std::size_t c = num_components; c-- > 0;) {
    m.strides_[c] = static_cast<int>(total);
    total *= static_cast<long long>(m.components_[c].state_names.size());
  }
  m.num_states_ = static_cast<int>(total);

  std::vector<int> init_tuple(num_components);
  for (std::size_t c = 0; c < num_components; ++c)
    init_tuple[c] = m.components_[c].initial;

  m.tuples_.resize(m.num_states_);
  m.labels_.resize(m.num_states_);
  {
    std::vector<int> tuple(num_components, 0);
    for (int id = 0; id < m.num_states_; ++id) {
      m.tuples_[id] = tuple;
      std::vector<std::string> label;
      for (std::size_t c = 0; c < num_components; ++c) {
        const auto& comp_label = m.components_[c].labels[tuple[c]];
        label.insert(label.end(), comp_label.begin(), comp_label.end());
      }
      std::sort(label.begin(), label.end());
      m.labels_[id] = std::move(label);
      for (std::size_t c = num_components; c-- > 0;) {
        if (++tuple[c] < static_cast<int>(m.components_[c].state_names.size()))
          break;
        tuple[c] = 0;
      }
    }
  }
  m.initial_ = m.state_of_tuple(init_tuple);

  std::vector<std::vector<std::vector<CapabilityTS::Edge>>> comp_out;
  comp_out.reserve(num_components);
  for (const CapabilityTS& c : m.components_) comp_out.push_back(c.out_edges());

  m.out_.resize(m.num_states_);
  for (int id = 0; id < m.num_states_; ++id) {
    const std::vector<int>& tuple = m.tuples_[id];
    // Cartesian product of the component out-edge lists.
    std::vector<std::size_t> pick(num_components, 0);
    bool done = false;
    while (!done) {
      int dst = 0;
      double weight = 0;
      for (std::size_t c = 0; c < num_components; ++c) {
        const CapabilityTS::Edge& e = comp_out[c][tuple[c]][pick[c]];
        dst += e.dst * m.strides_[c];
        weight += e.weight;
      }
      m.out_[id].push_back({dst, weight});
      done = true;
      for (std::size_t c = num_components; c-- > 0;) {
        if (++pick[c] < comp_out[c][tuple[c]].size()) {
          done = false;
          break;
        }
        pick[c] = 0;
      }
    }
    std::sort(m.out_[id].begin(), m.out_[id].end(),
              [](const RobotModel::Edge& a, const RobotModel::Edge& b) {
                return a.dst < b.dst;
              });
    m.num_transitions_ += m.out_[id].size();
  }
  return m;
}

}  // namespace taskforge::models
