// Copyright 2026 The theta-kernels Authors
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

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "theta_kernels/activation.hpp"
#include "theta_kernels/pgf.hpp"

namespace theta_kernels {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One panel of the activation comparison figure: a θ activation next to the
/// common activation it approximates.
struct FigureCurve {
  std::string name;
  ThetaParams params;
  Activation reference;
  std::vector<double> xs;
  std::vector<double> theta_phi;
  std::vector<double> reference_phi;
  /// max |θ activation − reference| over grid points in [−2, 2].
  double sup_distance = 0.0;
};

/// `name` is linear, prelu or relu. Grid [−3, 3] with step 0.01.
FigureCurve figure1_curve(std::string_view name, int k_max = kDefaultHermiteOrder);

}  // namespace theta_kernels
