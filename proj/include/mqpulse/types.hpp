/* Copyright 2026 The mqpulse Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace mqpulse {

using cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// N x 2 array, column 0 = x channel, column 1 = y channel.
using ChannelArray = Eigen::Matrix<double, Eigen::Dynamic, 2>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// arccos(1/sqrt(3))
inline const double kMagicAngle = std::acos(1.0 / std::sqrt(3.0));

}  // namespace mqpulse
