// Copyright 2026 The gnmverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gnm {

/// Multiplication table fails a group axiom. The message names the axiom.
class NotAGroup : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enumerated group would exceed the configured maximum order.
class GroupTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Exact evaluation (enumeration, dense operator, exact convolution) refused
/// because the problem exceeds its size cap.
class TooLargeForExact : public std::length_error {
 public:
  using std::length_error::length_error;
};

class StrategyDimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleInstance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IdentityOrder : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateDenominator : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ZeroPassProbability : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EmptyRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConstraintProjectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gnm
