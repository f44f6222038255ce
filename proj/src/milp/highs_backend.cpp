#include <cmath>

#include "coplan/milp.hpp"

#ifdef COPLAN_HAVE_HIGHS
#include "Highs.h"
#endif

namespace coplan::milp {

#ifdef COPLAN_HAVE_HIGHS

namespace {

class HighsBackend final : public Backend {
 public:
  std::string name() const override { return "highs"; }

  SolveResult run(const Model& model, const SolveLimits& limits) const override {
    SolveResult result;
    const int n = model.num_variables();
    if (n == 0) {
      result.status = check_solution(model, {}).empty() ? SolveStatus::Optimal : SolveStatus::Infeasible;
      return result;
    }

    HighsLp lp;
    lp.num_col_ = n;
    lp.num_row_ = static_cast<HighsInt>(model.constraints().size());
    lp.sense_ = model.sense() == Sense::Minimize ? ObjSense::kMinimize : ObjSense::kMaximize;
    lp.offset_ = model.objective_constant();
    lp.col_cost_.assign(n, 0.0);
    for (const auto& t : model.objective()) lp.col_cost_[t.var] = t.coef;
    lp.col_lower_.resize(n);
    lp.col_upper_.resize(n);
    lp.integrality_.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& v = model.variable(i);
      lp.col_lower_[i] = v.lower;
      lp.col_upper_[i] = v.upper;
      lp.integrality_[i] = v.type == VarType::Binary ? HighsVarType::kInteger : HighsVarType::kContinuous;
    }

    auto& a = lp.a_matrix_;
    a.format_ = MatrixFormat::kRowwise;
    a.num_col_ = n;
    a.num_row_ = lp.num_row_;
    a.start_.clear();
    a.start_.push_back(0);
    for (const auto& con : model.constraints()) {
      for (const auto& t : con.terms) {
        a.index_.push_back(t.var);
        a.value_.push_back(t.coef);
      }
      a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
      const double inf = kHighsInf;
      switch (con.relation) {
        case Relation::LessEqual:
          lp.row_lower_.push_back(-inf);
          lp.row_upper_.push_back(con.rhs);
          break;
        case Relation::GreaterEqual:
          lp.row_lower_.push_back(con.rhs);
          lp.row_upper_.push_back(inf);
          break;
        case Relation::Equal:
          lp.row_lower_.push_back(con.rhs);
          lp.row_upper_.push_back(con.rhs);
          break;
      }
    }

    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("threads", 1);
    highs.setOptionValue("random_seed", 0);
    highs.setOptionValue("time_limit", limits.time_limit_s);
    highs.setOptionValue("mip_rel_gap", limits.mip_gap);
    highs.setOptionValue("mip_abs_gap", limits.mip_gap > 0 ? 1e-6 : 1e-9);
    highs.setOptionValue("mip_feasibility_tolerance", 1e-7);
    highs.setOptionValue("primal_feasibility_tolerance", 1e-8);

    if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
      result.diagnostic = "HiGHS rejected the model";
      return result;
    }
    if (highs.run() == HighsStatus::kError) {
      result.diagnostic = "HiGHS run failed: " + highs.modelStatusToString(highs.getModelStatus());
      return result;
    }

    const auto status = highs.getModelStatus();
    const bool has_primal = highs.getInfo().primal_solution_status == kSolutionStatusFeasible;
    if (has_primal) result.values = highs.getSolution().col_value;

    switch (status) {
      case HighsModelStatus::kOptimal:
        result.status = SolveStatus::Optimal;
        break;
      case HighsModelStatus::kInfeasible:
      case HighsModelStatus::kUnboundedOrInfeasible:
        result.status = SolveStatus::Infeasible;
        break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
        result.hit_time_limit = true;
        if (has_primal) {
          result.status = SolveStatus::TimeLimitFeasible;
        } else {
          result.diagnostic = "time limit reached without incumbent";
        }
        break;
      default:
        result.diagnostic = "HiGHS model status: " + highs.modelStatusToString(status);
        break;
    }
    if (result.has_solution() && static_cast<int>(result.values.size()) != n) {
      result.status = SolveStatus::Error;
      result.diagnostic = "HiGHS returned no primal values";
    }
    return result;
  }
};

}  // namespace

std::unique_ptr<Backend> make_highs_backend() { return std::make_unique<HighsBackend>(); }

#else

std::unique_ptr<Backend> make_highs_backend() { return nullptr; }

#endif

}  // namespace coplan::milp
