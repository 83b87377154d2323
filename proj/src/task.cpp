#include "diffudict/task.hpp"

#include <stdexcept>

namespace diffudict {

ResidualKind ResidualKind::quadratic() { return ResidualKind{Kind::Quadratic, 0.0}; }

ResidualKind ResidualKind::huber(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("huber: eta must be > 0");
  return ResidualKind{Kind::Huber, eta};
}

CoeffRegularizer CoeffRegularizer::elastic_net(double gamma, double delta) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("elastic_net: gamma must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("elastic_net: delta must be > 0");
  return CoeffRegularizer{gamma, delta, false};
}

CoeffRegularizer CoeffRegularizer::nonneg_elastic_net(double gamma, double delta) {
  CoeffRegularizer reg = elastic_net(gamma, delta);
  reg.nonneg = true;
  return reg;
}

DictRegularizer DictRegularizer::none() { return DictRegularizer{Kind::None, 0.0}; }

DictRegularizer DictRegularizer::l1_sum(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("l1_sum: beta must be >= 0");
  return DictRegularizer{Kind::L1Sum, beta};
}

ConstraintSet ConstraintSet::unit_columns() { return ConstraintSet{Kind::UnitColumns}; }

ConstraintSet ConstraintSet::nonneg_unit_columns() {
  return ConstraintSet{Kind::NonnegUnitColumns};
}

void TaskSpec::validate() const {
  if (residual.is_huber() && !(residual.eta > 0.0))
    throw std::invalid_argument("task: huber eta must be > 0");
  if (!(coeff_reg.gamma >= 0.0)) throw std::invalid_argument("task: gamma must be >= 0");
  if (!(coeff_reg.delta > 0.0)) throw std::invalid_argument("task: delta must be > 0");
  if (dict_reg.kind == DictRegularizer::Kind::L1Sum && !(dict_reg.beta >= 0.0))
    throw std::invalid_argument("task: beta must be >= 0");
  if (coeff_reg.nonneg != constraint.nonneg())
    throw std::invalid_argument(
        "task: nonneg coefficient penalty must pair with nonneg unit columns");
}

TaskSpec TaskSpec::sparse_svd(double gamma, double delta) {
  return TaskSpec{ResidualKind::quadratic(), CoeffRegularizer::elastic_net(gamma, delta),
                  DictRegularizer::none(), ConstraintSet::unit_columns()};
}

TaskSpec TaskSpec::bi_clustering(double gamma, double delta, double beta) {
  return TaskSpec{ResidualKind::quadratic(), CoeffRegularizer::elastic_net(gamma, delta),
                  DictRegularizer::l1_sum(beta), ConstraintSet::unit_columns()};
}

TaskSpec TaskSpec::nmf(double gamma, double delta) {
  return TaskSpec{ResidualKind::quadratic(),
                  CoeffRegularizer::nonneg_elastic_net(gamma, delta), DictRegularizer::none(),
                  ConstraintSet::nonneg_unit_columns()};
}

TaskSpec TaskSpec::nmf_huber(double gamma, double delta, double eta) {
  return TaskSpec{ResidualKind::huber(eta),
                  CoeffRegularizer::nonneg_elastic_net(gamma, delta), DictRegularizer::none(),
                  ConstraintSet::nonneg_unit_columns()};
}

}  // namespace diffudict
