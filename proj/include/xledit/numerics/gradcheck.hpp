// Copyright 2026 The xledit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <span>
#include <string>

#include "xledit/numerics/autograd.hpp"
#include "xledit/numerics/rng.hpp"

namespace xledit::num {

struct GradCheckOptions {
  double step = 1e-5;
  /// Coordinates probed per parameter tensor; 0 probes every coordinate.
  std::size_t coords_per_param = 0;
  /// Denominator floor for the relative error, so coordinates whose true
  /// gradient is ~0 are judged on absolute error instead.
  double floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t coords_checked = 0;
  std::string worst;  // "param[index]: analytic vs numeric"
};

/// Compares backward() of `loss_fn` against central differences, perturbing
/// the parameters in place (and restoring them). rel = |a - n| /
/// max(|a|, |n|, floor).
GradCheckResult gradcheck(const std::function<Var<double>()>& loss_fn,
                          std::span<const Var<double>> params,
                          std::span<const std::string> names, const GradCheckOptions& opts = {});

}  // namespace xledit::num
