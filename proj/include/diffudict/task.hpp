#pragma once

#include <string>

namespace diffudict {

// Data-fidelity term applied to the residual x - W y.
struct ResidualKind {
  enum class Kind { Quadratic, Huber };

  Kind kind = Kind::Quadratic;
  double eta = 0.0;  // Huber transition point; meaningful only for Kind::Huber

  static ResidualKind quadratic();
  static ResidualKind huber(double eta);

  bool is_huber() const { return kind == Kind::Huber; }
};

// Elastic-net coefficient penalty gamma*|y|_1 + (delta/2)*|y|_2^2, with an
// optional nonnegativity restriction on the coefficients.
struct CoeffRegularizer {
  double gamma = 0.0;  // l1 weight, >= 0
  double delta = 1.0;  // l2 weight, > 0 (keeps the dual differentiable)
  bool nonneg = false;

  static CoeffRegularizer elastic_net(double gamma, double delta);
  static CoeffRegularizer nonneg_elastic_net(double gamma, double delta);
};

// Entrywise penalty on the dictionary itself.
struct DictRegularizer {
  enum class Kind { None, L1Sum };

  Kind kind = Kind::None;
  double beta = 0.0;  // l1 weight, >= 0; meaningful only for Kind::L1Sum

  static DictRegularizer none();
  static DictRegularizer l1_sum(double beta);
};

// Feasible set for every dictionary column.
struct ConstraintSet {
  enum class Kind { UnitColumns, NonnegUnitColumns };

  Kind kind = Kind::UnitColumns;

  static ConstraintSet unit_columns();
  static ConstraintSet nonneg_unit_columns();

  bool nonneg() const { return kind == Kind::NonnegUnitColumns; }
};

// Full problem description: residual loss, coefficient penalty, dictionary
// penalty and dictionary constraint. Invariant: a nonnegative coefficient
// penalty pairs with nonnegative columns, and a plain one with plain columns.
struct TaskSpec {
  ResidualKind residual;
  CoeffRegularizer coeff_reg;
  DictRegularizer dict_reg;
  ConstraintSet constraint;

  // Throws std::invalid_argument if any parameter or pairing is invalid.
  void validate() const;

  // Canonical task families.
  static TaskSpec sparse_svd(double gamma, double delta);
  static TaskSpec bi_clustering(double gamma, double delta, double beta);
  static TaskSpec nmf(double gamma, double delta);
  static TaskSpec nmf_huber(double gamma, double delta, double eta);
};

}  // namespace diffudict
