#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "coplan/milp.hpp"

namespace coplan::milp {

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::scale(double factor) {
  for (auto& t : terms_) t.coef *= factor;
  constant_ *= factor;
  return *this;
}

VarId Model::add_binary(std::string name) {
  variables_.push_back({std::move(name), VarType::Binary, 0.0, 1.0});
  return static_cast<VarId>(variables_.size()) - 1;
}

VarId Model::add_continuous(std::string name, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("continuous variable with lower > upper");
  variables_.push_back({std::move(name), VarType::Continuous, lower, upper});
  return static_cast<VarId>(variables_.size()) - 1;
}

std::vector<Term> Model::merged(const LinearExpr& expr) const {
  std::map<VarId, double> acc;
  for (const auto& t : expr.terms()) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw std::invalid_argument("expression references undeclared variable " + std::to_string(t.var));
    }
    acc[t.var] += t.coef;
  }
  std::vector<Term> out;
  out.reserve(acc.size());
  for (const auto& [v, c] : acc) {
    if (c != 0.0) out.push_back({v, c});
  }
  return out;
}

void Model::add_constraint(const LinearExpr& lhs, Relation relation, double rhs, std::string name) {
  constraints_.push_back({std::move(name), merged(lhs), relation, rhs - lhs.constant()});
}

void Model::set_objective(Sense sense, const LinearExpr& objective) {
  sense_ = sense;
  objective_ = merged(objective);
  objective_constant_ = objective.constant();
}

int Model::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [](const Variable& v) { return v.type == VarType::Binary; }));
}

void Model::set_big_m(double m) {
  if (!(m > 0)) throw std::invalid_argument("big-M must be positive");
  big_m_ = m;
}

double Model::evaluate_objective(std::span<const double> values) const {
  double z = objective_constant_;
  for (const auto& t : objective_) z += t.coef * values[t.var];
  return z;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimitFeasible: return "time-limit-feasible";
    case SolveStatus::Error: return "error";
  }
  return "unknown";
}

std::vector<std::string> check_solution(const Model& model, std::span<const double> values, double tol) {
  std::vector<std::string> problems;
  if (static_cast<int>(values.size()) != model.num_variables()) {
    problems.push_back("value vector has " + std::to_string(values.size()) + " entries for " +
                       std::to_string(model.num_variables()) + " variables");
    return problems;
  }
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& var = model.variable(i);
    const double x = values[i];
    if (x < var.lower - tol || x > var.upper + tol) {
      problems.push_back("variable " + var.name + " = " + std::to_string(x) + " outside bounds");
    }
    if (var.type == VarType::Binary && std::abs(x - std::round(x)) > kIntegralityTol) {
      problems.push_back("binary " + var.name + " = " + std::to_string(x) + " is fractional");
    }
  }
  int index = 0;
  for (const auto& con : model.constraints()) {
    double lhs = 0.0;
    for (const auto& t : con.terms) lhs += t.coef * values[t.var];
    bool ok = true;
    switch (con.relation) {
      case Relation::LessEqual: ok = lhs <= con.rhs + tol; break;
      case Relation::GreaterEqual: ok = lhs >= con.rhs - tol; break;
      case Relation::Equal: ok = std::abs(lhs - con.rhs) <= tol; break;
    }
    if (!ok) {
      std::ostringstream os;
      os << "constraint " << (con.name.empty() ? "#" + std::to_string(index) : con.name) << ": lhs " << lhs
         << " vs rhs " << con.rhs;
      problems.push_back(os.str());
    }
    ++index;
  }
  return problems;
}

SolveResult solve(const Model& model, const SolveLimits& limits, const Backend& backend) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result = backend.run(model, limits);
  if (result.has_solution()) {
    for (int i = 0; i < model.num_variables(); ++i) {
      if (model.variable(i).type != VarType::Binary) continue;
      double& x = result.values[i];
      if (std::abs(x - std::round(x)) > kIntegralityTol) {
        result.status = SolveStatus::Error;
        result.diagnostic = "backend returned fractional binary " + model.variable(i).name;
        break;
      }
      x = std::round(x);
    }
  }
  if (result.has_solution()) {
    auto problems = check_solution(model, result.values);
    if (!problems.empty()) {
      result.status = SolveStatus::Error;
      result.diagnostic = "solution failed re-check: " + problems.front();
    } else {
      result.objective = model.evaluate_objective(result.values);
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

std::string lp_name(const Model& model, VarId v) {
  // LP format forbids some characters; fall back to positional names.
  const auto& name = model.variable(v).name;
  if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' ||
               c == ']' || c == ',';
      })) {
    return "x" + std::to_string(v);
  }
  return name;
}

void write_terms(const Model& model, std::span<const Term> terms, std::ostream& os) {
  if (terms.empty()) {
    os << " 0 " << lp_name(model, 0);
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    const char* sign = t.coef < 0 ? "-" : "+";
    if (first && t.coef >= 0) sign = "";
    os << " " << sign << (first && t.coef >= 0 ? "" : " ") << std::abs(t.coef) << " " << lp_name(model, t.var);
    first = false;
  }
}

}  // namespace

void write_lp(const Model& model, std::ostream& os) {
  os << (model.sense() == Sense::Minimize ? "Minimize" : "Maximize") << "\n obj:";
  write_terms(model, model.objective(), os);
  if (model.objective_constant() != 0.0) os << " + " << model.objective_constant() << " constant_one";
  os << "\nSubject To\n";
  int index = 0;
  for (const auto& con : model.constraints()) {
    os << " c" << index++ << ":";
    write_terms(model, con.terms, os);
    switch (con.relation) {
      case Relation::LessEqual: os << " <= "; break;
      case Relation::GreaterEqual: os << " >= "; break;
      case Relation::Equal: os << " = "; break;
    }
    os << con.rhs << "\n";
  }
  if (model.objective_constant() != 0.0) os << " fix_constant: constant_one = 1\n";
  os << "Bounds\n";
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& v = model.variable(i);
    if (v.type == VarType::Continuous) os << " " << v.lower << " <= " << lp_name(model, i) << " <= " << v.upper << "\n";
  }
  os << "Binaries\n";
  for (int i = 0; i < model.num_variables(); ++i) {
    if (model.variable(i).type == VarType::Binary) os << " " << lp_name(model, i) << "\n";
  }
  os << "End\n";
}

std::shared_ptr<const Backend> default_backend() {
  const char* env = std::getenv("COPLAN_SOLVER");
  const std::string choice = env ? env : "";
  if (choice == "enumerate") return make_enumeration_backend();
  if (choice.empty() || choice == "highs") {
    if (auto highs = make_highs_backend()) return highs;
    if (choice == "highs") throw std::runtime_error("COPLAN_SOLVER=highs but HiGHS support was not built");
    return make_enumeration_backend();
  }
  throw std::runtime_error("unknown COPLAN_SOLVER value '" + choice + "'");
}

}  // namespace coplan::milp
