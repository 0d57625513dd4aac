// Copyright 2026 The mwg Authors
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

#ifndef MWG_ERROR_H_
#define MWG_ERROR_H_

#include <stdexcept>
#include <string>

namespace mwg {

// Status codes shared by the C API and the command-line tool's exit codes.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kInfeasible = 2,
  kInternal = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Violated precondition: bad instance, value outside its domain, malformed
// input file.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

// A numerical routine failed to establish something that theory says must
// hold (root bracketing, calibration convergence).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCode::kInternal, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorCode::kInfeasible, what) {}
};

}  // namespace mwg

#endif  // MWG_ERROR_H_
