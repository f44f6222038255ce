#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace coplan::milp {

using VarId = int;

enum class VarType { Binary, Continuous };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };

struct Variable {
  std::string name;
  VarType type = VarType::Binary;
  double lower = 0.0;
  double upper = 1.0;
};

struct Term {
  VarId var = 0;
  double coef = 0.0;
};

// Sparse linear expression; repeated variables are allowed and summed.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)

  LinearExpr& add(VarId var, double coef = 1.0) {
    terms_.push_back({var, coef});
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator+=(double c) {
    constant_ += c;
    return *this;
  }
  LinearExpr& scale(double factor);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // merged, no duplicates, no zero coefficients
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

// A mixed-integer linear program. Constraint constants are moved to the
// right-hand side at insertion.
class Model {
 public:
  VarId add_binary(std::string name);
  VarId add_continuous(std::string name, double lower, double upper);

  // Adds lhs (relation) rhs. Throws std::invalid_argument on undeclared
  // variables.
  void add_constraint(const LinearExpr& lhs, Relation relation, double rhs, std::string name = {});
  void set_objective(Sense sense, const LinearExpr& objective);

  std::span<const Variable> variables() const { return variables_; }
  std::span<const Constraint> constraints() const { return constraints_; }
  const Variable& variable(VarId v) const { return variables_.at(v); }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_binaries() const;
  Sense sense() const { return sense_; }
  std::span<const Term> objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

  // Big-M used by the builders; horizon_steps + 1 is enough for every
  // indicator constraint in this project.
  double big_m() const { return big_m_; }
  void set_big_m(double m);

  double evaluate_objective(std::span<const double> values) const;

 private:
  std::vector<Term> merged(const LinearExpr& expr) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  double objective_constant_ = 0.0;
  Sense sense_ = Sense::Minimize;
  double big_m_ = 1e6;
};

enum class SolveStatus { Optimal, Infeasible, TimeLimitFeasible, Error };

std::string to_string(SolveStatus status);

struct SolveLimits {
  double time_limit_s = 60.0;
  double mip_gap = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  std::vector<double> values;
  double objective = 0.0;
  double wall_seconds = 0.0;
  bool hit_time_limit = false;
  std::string diagnostic;

  bool has_solution() const {
    return status == SolveStatus::Optimal || status == SolveStatus::TimeLimitFeasible;
  }
  double value(VarId v) const { return values.at(v); }
  bool is_one(VarId v) const { return values.at(v) > 0.5; }
};

inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Raw backend solve; callers normally go through milp::solve().
  virtual SolveResult run(const Model& model, const SolveLimits& limits) const = 0;
};

// Exhaustive branch-and-bound over binaries with bound propagation. Handles
// pure-binary models with at most `max_binaries` variables.
std::unique_ptr<Backend> make_enumeration_backend(int max_binaries = 30);
// nullptr when the project was built without HiGHS.
std::unique_ptr<Backend> make_highs_backend();
// Selected by the COPLAN_SOLVER environment variable ("highs" or
// "enumerate"); defaults to HiGHS when available.
std::shared_ptr<const Backend> default_backend();

// Solves, rounds binaries to exact {0,1}, and re-checks feasibility by
// substitution. A solution that fails the re-check is reported as Error.
SolveResult solve(const Model& model, const SolveLimits& limits, const Backend& backend);

// Independent substitution checker: one message per violated bound,
// integrality requirement or constraint.
std::vector<std::string> check_solution(const Model& model, std::span<const double> values,
                                        double tol = kFeasibilityTol);

// CPLEX LP format dump.
void write_lp(const Model& model, std::ostream& os);

}  // namespace coplan::milp
