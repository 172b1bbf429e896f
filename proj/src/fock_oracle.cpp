/*
 * Copyright 2026 The fockfusion Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fockfusion/fock_oracle.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace fockfusion::oracle {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("reflectivity eta must lie in [0, 1]");
  }
}

}  // namespace

Eigen::MatrixXd generator_block(PhotonCount total) {
  if (total < 0) throw std::domain_error("photon number must be non-negative");
  const Eigen::Index dim = total + 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k + 1 < dim; ++k) {
    const double w = std::sqrt(static_cast<double>((k + 1) * (total - k)));
    g(k + 1, k) = w;
    g(k, k + 1) = w;
  }
  return g;
}

Eigen::MatrixXcd beamsplitter_unitary(PhotonCount total, double theta) {
  if (total > kMatrixCap) {
    throw CapacityError("oracle matrix route supports N <= " + std::to_string(kMatrixCap));
  }
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw std::domain_error("theta must lie in [0, pi/2]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(generator_block(total));
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  Eigen::VectorXcd phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(1.0, -theta * lambda(i));
  }
  const Eigen::MatrixXcd vc = v.cast<std::complex<double>>();
  return vc * phases.asDiagonal() * vc.adjoint();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

SubtractionDistribution oracle_distribution(PhotonCount m, PhotonCount n, double eta) {
  check_eta(eta);
  if (m < 0 || n < 0) throw std::domain_error("photon counts must be non-negative");
  const PhotonCount total = m + n;
  const Eigen::MatrixXcd u = beamsplitter_unitary(total, std::acos(eta));
  SubtractionDistribution out;
  out.m = m;
  out.n = n;
  out.eta = eta;
  out.probs.resize(static_cast<std::size_t>(total + 1));
  for (PhotonCount s = 0; s <= total; ++s) {
    out.probs[s] = std::norm(u(s, m));
  }
  return out;
}

SubtractionDistribution convolution_distribution(PhotonCount m, PhotonCount n, double eta) {
  check_eta(eta);
  if (m < 0 || n < 0) throw std::domain_error("photon counts must be non-negative");
  if (m + n > kConvolutionCap) {
    throw CapacityError("convolution route supports m+n <= " + std::to_string(kConvolutionCap));
  }
  const Float50 e(eta);
  const Float50 t = sqrt(Float50(1) - e * e);

  // powers of a^dag from each input: A[j] from mode one, B[k] from mode two
  std::vector<Float50> a(m + 1), b(n + 1);
  for (int j = 0; j <= m; ++j) {
    a[j] = Float50(binomial(m, j).get_str()) * pow(e, j) * pow(t, m - j);
  }
  for (int k = 0; k <= n; ++k) {
    const Float50 sign = ((n - k) & 1) ? -1 : 1;
    b[k] = Float50(binomial(n, k).get_str()) * pow(t, k) * pow(e, n - k) * sign;
  }

  const int total = m + n;
  std::vector<Float50> coeff(total + 1, Float50(0));
  for (int j = 0; j <= m; ++j) {
    for (int k = 0; k <= n; ++k) coeff[j + k] += a[j] * b[k];
  }

  SubtractionDistribution out;
  out.m = m;
  out.n = n;
  out.eta = eta;
  out.probs.resize(static_cast<std::size_t>(total + 1));
  const Float50 inputs = Float50(factorial(m).get_str()) * Float50(factorial(n).get_str());
  for (int s = 0; s <= total; ++s) {
    const Float50 outputs =
        Float50(factorial(s).get_str()) * Float50(factorial(total - s).get_str());
    out.probs[s] = static_cast<double>(coeff[s] * coeff[s] * outputs / inputs);
  }
  return out;
}

}  // namespace fockfusion::oracle
