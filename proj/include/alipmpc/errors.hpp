// Copyright 2026 The alipmpc Authors
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

#include <stdexcept>
#include <string>

namespace alipmpc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented precondition (non-positive mass, empty
/// interval, out-of-range time, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The implicit velocity system of the exact CoM dynamics is singular: the
/// CoM sits on the line where k_x*x_c + k_y*y_c + z_H = 0.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Friction cannot hold the robot on the slope even when standing still.
class SlopeExceedsFriction : public Error {
 public:
  using Error::Error;
};

/// Riccati iteration failed to reach its fixed point.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Scenario file could not be parsed or violates the schema.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace alipmpc
