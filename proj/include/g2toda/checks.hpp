#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "g2toda/numerics.hpp"
#include "g2toda/params.hpp"

namespace g2toda {

struct Record {
  std::string name;
  std::map<std::string, double> inputs;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

bool all_pass(const std::vector<Record>& rs);

// (N1, N2) sets and the two lambda choices used by the exactness and kernel suites
std::vector<std::pair<int, int>> standard_index_sets();
std::vector<TodaParams> standard_params();

std::vector<Record> suite_toda(const std::vector<TodaParams>& ps, double tol = 1e-8);
std::vector<Record> suite_kernels(const std::vector<TodaParams>& ps, double tol = 1e-6);
std::vector<Record> suite_phi(const std::vector<int>& Ns, double tol = 1e-8);
std::vector<Record> suite_duality(const std::vector<int>& Ns, double tol = 1e-6);
std::vector<Record> suite_closed_forms(const std::vector<int>& Ns, double tol = 1e-6, Exec exec = Exec::Parallel);
// nonzero Gram determinants for each parameter set, nonzero T determinant and the dense/block comparison
std::vector<Record> suite_determinants(const std::vector<TodaParams>& gram_params, const std::vector<int>& Ns,
                                       double tol = 1e-10, Exec exec = Exec::Parallel);
std::vector<Record> suite_gamma(int mu1, int mu2, const std::vector<double>& lambda_tilde, double tol = 0.10);

// projection difference against pi T a along each coordinate direction and one mixed direction
std::vector<Record> suite_linearization(int N, double eps, double a_norm, double tol = 0.15);

// residual scaling, reduced solve, projected fixed point and decay for the symmetric configuration
std::vector<Record> suite_assembly(int N, const std::vector<double>& eps, double C = 10.0);

}  // namespace g2toda
