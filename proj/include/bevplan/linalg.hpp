// Copyright 2026 The bevplan Authors. All Rights Reserved.
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

#include <Eigen/Core>

namespace bevplan {

struct SvdResult {
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXd v;                // right singular vectors, one per column
};

// One-sided (Hestenes) Jacobi SVD. Only the singular values and the right
// singular vectors are produced; that is all the DLT solver needs.
SvdResult JacobiSvd(const Eigen::MatrixXd& a, int max_sweeps = 60);

}  // namespace bevplan
