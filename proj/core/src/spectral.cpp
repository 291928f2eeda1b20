#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "advcongest/graph.hpp"

namespace advcongest {

ConductanceEstimate conductance_estimate(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  if (n < 2) throw std::invalid_argument("conductance estimate needs at least two nodes");
  if (g.min_degree() == 0) throw std::invalid_argument("conductance undefined with an isolated node");
  if (n > 4096) throw std::invalid_argument("graph too large for the dense spectral estimate");

  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  for (const auto& e : g.edges()) {
    double w = 1.0 / std::sqrt(static_cast<double>(g.degree(e.u)) * static_cast<double>(g.degree(e.v)));
    lap(e.u, e.v) -= w;
    lap(e.v, e.u) -= w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen solver failed");

  ConductanceEstimate est;
  est.lambda2 = std::max(0.0, solver.eigenvalues()(1));
  est.lower = est.lambda2 / 2.0;
  est.upper = std::min(1.0, std::sqrt(2.0 * est.lambda2));
  est.min_degree = g.min_degree();
  est.max_degree = g.max_degree();
  return est;
}

}  // namespace advcongest
