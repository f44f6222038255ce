#include <chrono>
#include <cmath>
#include <limits>

#include "coplan/milp.hpp"

namespace coplan::milp {

namespace {

// Depth-first branch-and-bound over binaries. Each node keeps, per
// constraint, the activity of fixed variables and the min/max reachable
// activity of the free ones, so infeasible subtrees are cut early.
class EnumerationBackend final : public Backend {
 public:
  explicit EnumerationBackend(int max_binaries) : max_binaries_(max_binaries) {}

  std::string name() const override { return "enumerate"; }

  SolveResult run(const Model& model, const SolveLimits& limits) const override {
    SolveResult result;
    for (const auto& v : model.variables()) {
      if (v.type != VarType::Binary) {
        result.diagnostic = "enumeration backend supports binary variables only";
        return result;
      }
    }
    if (model.num_variables() > max_binaries_) {
      result.diagnostic = "model has " + std::to_string(model.num_variables()) +
                          " binaries; enumeration limit is " + std::to_string(max_binaries_);
      return result;
    }
    Search search(model, limits);
    search.run();
    if (search.found) {
      result.status = search.timed_out ? SolveStatus::TimeLimitFeasible : SolveStatus::Optimal;
      result.values = search.best_values;
      result.objective = model.evaluate_objective(result.values);
    } else {
      result.status = search.timed_out ? SolveStatus::Error : SolveStatus::Infeasible;
      if (search.timed_out) result.diagnostic = "time limit reached without incumbent";
    }
    result.hit_time_limit = search.timed_out;
    return result;
  }

 private:
  struct Search {
    Search(const Model& m, const SolveLimits& l)
        : model(m),
          limits(l),
          deadline(std::chrono::steady_clock::now() +
                   std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(l.time_limit_s))) {
      const int n = model.num_variables();
      const auto cons = model.constraints();
      fixed.assign(cons.size(), 0.0);
      free_min.assign(cons.size(), 0.0);
      free_max.assign(cons.size(), 0.0);
      occurs.resize(n);
      for (std::size_t c = 0; c < cons.size(); ++c) {
        for (const auto& t : cons[c].terms) {
          occurs[t.var].push_back({static_cast<VarId>(c), t.coef});
          (t.coef < 0 ? free_min[c] : free_max[c]) += t.coef;
        }
      }
      sign = model.sense() == Sense::Minimize ? 1.0 : -1.0;
      obj.assign(n, 0.0);
      for (const auto& t : model.objective()) obj[t.var] = sign * t.coef;
      free_obj_min = 0.0;
      for (double c : obj) free_obj_min += std::min(c, 0.0);
      values.assign(n, 0.0);
    }

    bool node_feasible(VarId var) const {
      for (const auto& [c, coef] : occurs[var]) {
        (void)coef;
        const auto& con = model.constraints()[c];
        const double lo = fixed[c] + free_min[c];
        const double hi = fixed[c] + free_max[c];
        switch (con.relation) {
          case Relation::LessEqual:
            if (lo > con.rhs + kFeasibilityTol) return false;
            break;
          case Relation::GreaterEqual:
            if (hi < con.rhs - kFeasibilityTol) return false;
            break;
          case Relation::Equal:
            if (lo > con.rhs + kFeasibilityTol || hi < con.rhs - kFeasibilityTol) return false;
            break;
        }
      }
      return true;
    }

    void assign(VarId var, double x, double direction) {
      for (const auto& [c, coef] : occurs[var]) {
        (coef < 0 ? free_min[c] : free_max[c]) -= direction * coef;
        fixed[c] += direction * coef * x;
      }
      free_obj_min -= direction * std::min(obj[var], 0.0);
      fixed_obj += direction * obj[var] * x;
    }

    void run() {
      // Constraints with no variables are checked once up front.
      for (const auto& con : model.constraints()) {
        if (!con.terms.empty()) continue;
        const bool ok = (con.relation == Relation::LessEqual && 0.0 <= con.rhs + kFeasibilityTol) ||
                        (con.relation == Relation::GreaterEqual && 0.0 >= con.rhs - kFeasibilityTol) ||
                        (con.relation == Relation::Equal && std::abs(con.rhs) <= kFeasibilityTol);
        if (!ok) return;
      }
      dfs(0);
    }

    void dfs(VarId var) {
      if (timed_out) return;
      if ((++nodes & 0xfff) == 0 && std::chrono::steady_clock::now() > deadline) {
        timed_out = true;
        return;
      }
      if (found && fixed_obj + free_obj_min >= best - 1e-9) return;
      if (var == model.num_variables()) {
        found = true;
        best = fixed_obj;
        best_values = values;
        return;
      }
      for (double x : {0.0, 1.0}) {
        assign(var, x, 1.0);
        values[var] = x;
        if (node_feasible(var)) dfs(var + 1);
        assign(var, x, -1.0);
        values[var] = 0.0;
      }
    }

    const Model& model;
    const SolveLimits& limits;
    std::chrono::steady_clock::time_point deadline;
    std::vector<double> fixed, free_min, free_max;
    std::vector<std::vector<std::pair<VarId, double>>> occurs;
    std::vector<double> obj;
    double sign = 1.0;
    double fixed_obj = 0.0;
    double free_obj_min = 0.0;
    std::vector<double> values;
    std::vector<double> best_values;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    bool timed_out = false;
    long long nodes = 0;
  };

  int max_binaries_;
};

}  // namespace

std::unique_ptr<Backend> make_enumeration_backend(int max_binaries) {
  return std::make_unique<EnumerationBackend>(max_binaries);
}

}  // namespace coplan::milp
