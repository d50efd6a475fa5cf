/*
 * Copyright 2026 The byzlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef BYZLAB_ERROR_HPP_
#define BYZLAB_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace byzlab {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or length disagreement between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold (e.g. Multi-KRUM
// called with n - f - 2 < 1).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the byte offset (binary formats) or the
// 1-based line number (text formats) where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t location)
      : Error(what), location_(location) {}
  std::uint64_t location() const { return location_; }

 private:
  std::uint64_t location_;
};

// Invalid run configuration: unknown key, bad value or violated constraint.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace byzlab

#endif  // BYZLAB_ERROR_HPP_
