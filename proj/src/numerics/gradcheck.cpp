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

#include "xledit/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xledit::num {

GradCheckResult gradcheck(const std::function<Var<double>()>& loss_fn,
                          std::span<const Var<double>> params,
                          std::span<const std::string> names, const GradCheckOptions& opts) {
  XLEDIT_REQUIRE(names.empty() || names.size() == params.size(), "gradcheck: one name per parameter");
  GradMap<double> analytic = backward(loss_fn());
  Rng rng(opts.seed);
  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor<double>& w = params[k].mutable_value();
    const auto it = analytic.find(params[k].id());
    std::vector<std::size_t> coords;
    if (opts.coords_per_param == 0 || opts.coords_per_param >= w.size()) {
      coords.resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) coords[i] = i;
    } else {
      for (std::size_t c = 0; c < opts.coords_per_param; ++c) coords.push_back(rng.below(w.size()));
    }
    for (std::size_t idx : coords) {
      const double saved = w[idx];
      w[idx] = saved + opts.step;
      const double up = loss_fn().item();
      w[idx] = saved - opts.step;
      const double down = loss_fn().item();
      w[idx] = saved;
      const double numeric = (up - down) / (2 * opts.step);
      const double a = it == analytic.end() ? 0.0 : it->second[idx];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coords_checked;
      if (rel > result.max_rel_error || result.worst.empty()) {
        result.max_rel_error = std::max(result.max_rel_error, rel);
        std::ostringstream os;
        os << (names.empty() ? "param" + std::to_string(k) : names[k]) << "[" << idx
           << "]: analytic " << a << " vs numeric " << numeric;
        result.worst = os.str();
      }
    }
  }
  return result;
}

}  // namespace xledit::num
