#include "cshd/registry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cshd {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

RegistryFunction rosenbrock2() {
  RegistryFunction f;
  f.name = "rosenbrock2";
  f.formula = "(1 - y1)^2 + 100 (y2 - y1^2)^2";
  f.dimension = 2;
  f.value = [](const VectorXd& y) {
    const double a = 1.0 - y(0);
    const double b = y(1) - y(0) * y(0);
    return a * a + 100.0 * b * b;
  };
  f.gradient = [](const VectorXd& y) {
    const double b = y(1) - y(0) * y(0);
    VectorXd g(2);
    g << -2.0 * (1.0 - y(0)) - 400.0 * y(0) * b, 200.0 * b;
    return g;
  };
  f.hessian = [](const VectorXd& y) {
    MatrixXd h(2, 2);
    h << 2.0 - 400.0 * y(1) + 1200.0 * y(0) * y(0), -400.0 * y(0), -400.0 * y(0), 200.0;
    return h;
  };
  // The only nonzero fourth derivative is d^4/dy1^4 = 2400.
  f.lipschitz_bound = [](const VectorXd&, double) { return 2400.0; };
  return f;
}

// Derivative of p = y1 y2 y3 with respect to the coordinates in `block`,
// evaluated with coordinates `c`.
double product_derivative(const std::array<int, 4>& idx, unsigned mask, const std::array<double, 3>& c) {
  std::array<int, 3> seen{0, 0, 0};
  int count = 0;
  for (int t = 0; t < 4; ++t) {
    if (mask & (1u << t)) {
      if (++seen[idx[t]] > 1) return 0.0;
      ++count;
    }
  }
  double v = 1.0;
  for (int m = 0; m < 3; ++m) {
    if (!seen[m]) v *= c[m];
  }
  return count >= 1 && count <= 3 ? v : 0.0;
}

// Sum over set partitions of {0,1,2,3} of the product of block derivatives
// of p: the fourth derivative of exp(p) divided by exp(p).
double faa_di_bruno_sum(const std::array<int, 4>& idx, const std::array<double, 3>& c) {
  double total = 0.0;
  // Restricted growth strings enumerate the 15 set partitions.
  std::array<int, 4> rgs{0, 0, 0, 0};
  while (true) {
    int blocks = 0;
    for (int v : rgs) blocks = std::max(blocks, v + 1);
    double term = 1.0;
    for (int b = 0; b < blocks && term != 0.0; ++b) {
      unsigned mask = 0;
      for (int t = 0; t < 4; ++t) {
        if (rgs[t] == b) mask |= 1u << t;
      }
      term *= product_derivative(idx, mask, c);
    }
    total += term;

    int pos = 3;
    while (pos > 0) {
      int prefix_max = 0;
      for (int t = 0; t < pos; ++t) prefix_max = std::max(prefix_max, rgs[t]);
      if (rgs[pos] <= prefix_max) {
        ++rgs[pos];
        for (int t = pos + 1; t < 4; ++t) rgs[t] = 0;
        break;
      }
      --pos;
    }
    if (pos == 0) break;
  }
  return total;
}

VectorXd fourth_derivative_tensor(const std::array<double, 3>& c, double exp_factor) {
  VectorXd t(81);
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          t(i + 3 * (j + 3 * (k + 3 * l))) = exp_factor * faa_di_bruno_sum({i, j, k, l}, c);
  return t;
}

RegistryFunction expprod3() {
  RegistryFunction f;
  f.name = "expprod3";
  f.formula = "exp(y1 y2 y3)";
  f.dimension = 3;
  f.value = [](const VectorXd& y) { return std::exp(y(0) * y(1) * y(2)); };
  f.gradient = [](const VectorXd& y) {
    const double e = std::exp(y(0) * y(1) * y(2));
    VectorXd g(3);
    g << y(1) * y(2) * e, y(0) * y(2) * e, y(0) * y(1) * e;
    return g;
  };
  f.hessian = [](const VectorXd& y) {
    const double e = std::exp(y(0) * y(1) * y(2));
    const VectorXd p{{y(1) * y(2), y(0) * y(2), y(0) * y(1)}};
    MatrixXd h = p * p.transpose();
    h(0, 1) += y(2);
    h(1, 0) += y(2);
    h(0, 2) += y(1);
    h(2, 0) += y(1);
    h(1, 2) += y(0);
    h(2, 1) += y(0);
    return MatrixXd(e * h);
  };
  f.lipschitz_bound = expprod3_lipschitz_bound;
  return f;
}

RegistryFunction bilinear2() {
  constexpr double alpha = 2.0;
  RegistryFunction f;
  f.name = "bilinear2";
  f.formula = "2 y1 y2";
  f.dimension = 2;
  f.value = [](const VectorXd& y) { return alpha * y(0) * y(1); };
  f.gradient = [](const VectorXd& y) { return VectorXd{{alpha * y(1), alpha * y(0)}}; };
  f.hessian = [](const VectorXd&) { return MatrixXd{{0.0, alpha}, {alpha, 0.0}}; };
  f.lipschitz_bound = [](const VectorXd&, double) { return 0.0; };
  return f;
}

RegistryFunction quartic2() {
  RegistryFunction f;
  f.name = "quartic2";
  f.formula = "y1^4 + y2^4";
  f.dimension = 2;
  f.value = [](const VectorXd& y) { return std::pow(y(0), 4) + std::pow(y(1), 4); };
  f.gradient = [](const VectorXd& y) {
    return VectorXd{{4.0 * std::pow(y(0), 3), 4.0 * std::pow(y(1), 3)}};
  };
  f.hessian = [](const VectorXd& y) {
    return MatrixXd{{12.0 * y(0) * y(0), 0.0}, {0.0, 12.0 * y(1) * y(1)}};
  };
  // Fourth derivative is 24 on both diagonal entries; sup over unit s of
  // 24 (s1^4 + s2^4) is 24.
  f.lipschitz_bound = [](const VectorXd&, double) { return 24.0; };
  return f;
}

}  // namespace

VectorXd expprod3_fourth_derivative(const VectorXd& y) {
  if (y.size() != 3) throw DimensionError("expprod3 is defined on R^3");
  return fourth_derivative_tensor({y(0), y(1), y(2)}, std::exp(y(0) * y(1) * y(2)));
}

double expprod3_lipschitz_bound(const VectorXd& center, double radius) {
  if (center.size() != 3) throw DimensionError("expprod3 is defined on R^3");
  if (!(radius >= 0.0)) throw ParameterError("radius must be nonnegative");
  const std::array<double, 3> b{std::abs(center(0)) + radius, std::abs(center(1)) + radius,
                                std::abs(center(2)) + radius};
  return fourth_derivative_tensor(b, std::exp(b[0] * b[1] * b[2])).norm();
}

const std::vector<RegistryFunction>& function_registry() {
  static const std::vector<RegistryFunction> registry{rosenbrock2(), expprod3(), bilinear2(),
                                                      quartic2()};
  return registry;
}

const RegistryFunction& find_function(std::string_view name) {
  std::string known;
  for (const auto& f : function_registry()) {
    if (f.name == name) return f;
    known += (known.empty() ? "" : ", ") + f.name;
  }
  throw ParameterError("unknown function '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace cshd
