// Copyright 2026 The homotomo Authors
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

#ifndef HOMOTOMO_ERRORS_HPP
#define HOMOTOMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace homotomo {

/// Argument outside the mathematical domain of an operation (bad index, non-finite input, ...).
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// A state cannot be represented at the requested Fock truncation.
class TruncationError : public DomainError {
   public:
    TruncationError(const std::string &what, int minimal_dim) : DomainError(what), minimal_dim_(minimal_dim) {
    }
    int minimal_dim() const {
        return minimal_dim_;
    }

   private:
    int minimal_dim_;
};

/// Malformed input data (dataset or state files).
class DataError : public std::runtime_error {
   public:
    DataError(const std::string &what, long line = -1) : std::runtime_error(what), line_(line) {
    }
    long line() const {
        return line_;
    }

   private:
    long line_;
};

/// A numerical procedure failed (envelope too loose, optimizer diverged, ...).
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace homotomo

#endif
