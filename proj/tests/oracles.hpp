// Copyright 2026 The hforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <random>

#include "hforge/qcore.hpp"

// Small independent helpers shared by the unit tests.
namespace oracle {

using hforge::cplx;
using hforge::Mat;

inline Mat hadamard() { return Mat((hforge::pauli_x() + hforge::pauli_z()) / std::sqrt(2.0)); }

inline Mat diag(std::initializer_list<cplx> d) {
  Mat m = Mat::Zero(Eigen::Index(d.size()), Eigen::Index(d.size()));
  int k = 0;
  for (cplx v : d) m(k, k) = v, ++k;
  return m;
}

inline Mat random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

// Taylor series of e^{-iHt}, independent of the eigen-decomposition path.
inline Mat taylor_expm(const Mat& h, double t, int terms = 80) {
  Mat out = Mat::Identity(h.rows(), h.cols()), term = out;
  for (int k = 1; k < terms; ++k) {
    term = term * (-hforge::kI * t * h) / double(k);
    out += term;
  }
  return out;
}

}  // namespace oracle
