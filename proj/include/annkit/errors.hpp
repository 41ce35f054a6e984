// Copyright 2026-present the annkit project
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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace annkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

/// An operation was issued in a state that does not allow it, e.g. raw
/// access after the construction cache was dropped.
class StateError : public Error {
public:
    using Error::Error;
};

/// The measure is not defined for the vector kind (SquaredL2 over sparse).
class UnsupportedCombination : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated file. `offset` is the byte position where
/// parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {
    }

    std::uint64_t
    offset() const noexcept {
        return offset_;
    }

private:
    std::uint64_t offset_;
};

}  // namespace annkit
