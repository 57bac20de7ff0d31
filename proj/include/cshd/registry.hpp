#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cshd/centered_calculus.hpp"
#include "cshd/error_analysis.hpp"

namespace cshd {

/// A named test function with analytic derivatives.
struct RegistryFunction {
  using Value = std::function<double(const Eigen::VectorXd&)>;
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Hessian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  /// Certified upper bound on the Lipschitz constant of the third derivative
  /// over the closed ball B(center; radius).
  using LipschitzBound = std::function<double(const Eigen::VectorXd& center, double radius)>;

  std::string name;
  std::string formula;
  Index dimension = 0;
  Value value;
  Gradient gradient;
  Hessian hessian;
  LipschitzBound lipschitz_bound;

  Eigen::VectorXd diag_hessian(const Eigen::VectorXd& x) const { return hessian(x).diagonal(); }
  TruthSource<double> truth() const { return TruthSource<double>::analytic(hessian); }
  Objective<double> objective() const { return Objective<double>(dimension, value); }
  bool has_lipschitz_bound() const { return static_cast<bool>(lipschitz_bound); }
};

/// rosenbrock2, expprod3, bilinear2, quartic2.
const std::vector<RegistryFunction>& function_registry();

/// Throws ParameterError naming the known functions if `name` is unknown.
const RegistryFunction& find_function(std::string_view name);

/// Fourth-derivative tensor of exp(y1 y2 y3), flattened as in
/// third_derivative_tensor with one more index: i + 3 (j + 3 (k + 3 l)).
Eigen::VectorXd expprod3_fourth_derivative(const Eigen::VectorXd& y);

/// Frobenius norm of an entrywise bound of expprod3_fourth_derivative over
/// B(center; radius). Dominates the multilinear operator norm of the fourth
/// derivative, hence the Lipschitz constant of the third.
double expprod3_lipschitz_bound(const Eigen::VectorXd& center, double radius);

}  // namespace cshd
