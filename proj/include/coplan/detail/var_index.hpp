#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "coplan/milp.hpp"
#include "coplan/types.hpp"

namespace coplan::detail {

struct TimeWindow {
  Timestep first = 0;
  Timestep last = -1;
  bool contains(Timestep t) const { return t >= first && t <= last; }
};

// (resource, time) -> variable map for one flight's presence or choice block.
class VarIndex {
 public:
  void set(ResourceId r, Timestep t, milp::VarId v) { vars_[{r, t}] = v; }
  milp::VarId find(ResourceId r, Timestep t) const {
    auto it = vars_.find({r, t});
    return it == vars_.end() ? -1 : it->second;
  }
  milp::VarId at(ResourceId r, Timestep t) const {
    auto v = find(r, t);
    if (v < 0) throw std::logic_error("no variable for (r=" + std::to_string(r) + ",t=" + std::to_string(t) + ")");
    return v;
  }
  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [rt, v] : vars_) f(rt.resource, rt.t, v);
  }
  std::size_t size() const { return vars_.size(); }

 private:
  std::map<ResourceTime, milp::VarId> vars_;
};

}  // namespace coplan::detail
