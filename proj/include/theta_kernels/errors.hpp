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

#include <stdexcept>
#include <string>

namespace theta_kernels {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters, shapes or arguments outside an operation's domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation that was well-posed but failed numerically.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define THETA_KERNELS_DEFINE_ERROR(Name, Base) \
  class Name : public Base {                   \
   public:                                     \
    using Base::Base;                          \
  };

THETA_KERNELS_DEFINE_ERROR(RegimeViolation, ValidationError)
THETA_KERNELS_DEFINE_ERROR(DerivedCMismatch, ValidationError)
THETA_KERNELS_DEFINE_ERROR(DomainError, ValidationError)
THETA_KERNELS_DEFINE_ERROR(EmptySequence, ValidationError)
THETA_KERNELS_DEFINE_ERROR(InvalidCoefficients, ValidationError)
THETA_KERNELS_DEFINE_ERROR(InvalidRegime, ValidationError)
THETA_KERNELS_DEFINE_ERROR(ZeroVector, ValidationError)
THETA_KERNELS_DEFINE_ERROR(DimensionMismatch, ValidationError)
THETA_KERNELS_DEFINE_ERROR(UnknownSumConvergence, ValidationError)
THETA_KERNELS_DEFINE_ERROR(IndexOutOfRange, ValidationError)
THETA_KERNELS_DEFINE_ERROR(DimensionUnsupported, ValidationError)
THETA_KERNELS_DEFINE_ERROR(NotSquareIntegrableWithinBudget, ValidationError)

THETA_KERNELS_DEFINE_ERROR(NumericalInstability, NumericalError)
THETA_KERNELS_DEFINE_ERROR(ZeroNormLayer, NumericalError)
THETA_KERNELS_DEFINE_ERROR(FactorizationFailed, NumericalError)

#undef THETA_KERNELS_DEFINE_ERROR

}  // namespace theta_kernels
