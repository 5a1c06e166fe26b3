#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace springfem {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, invalid parameters, unsupported requests.
class InputError : public Error {
public:
  using Error::Error;
};

// Factorization failures, solver non-convergence, inconsistent assembly.
class NumericalError : public Error {
public:
  using Error::Error;
};

enum class MeshErrorKind {
  MalformedHeader,
  MalformedLine,
  IndexOutOfRange,
  DuplicateIndex,
  DegenerateElement,
  NonFiniteCoordinate,
  NonManifold,
};

const char* to_string(MeshErrorKind kind) noexcept;

class MeshError : public InputError {
public:
  MeshError(MeshErrorKind kind, std::size_t line, const std::string& message, long item = -1);

  MeshErrorKind kind() const noexcept { return kind_; }
  // 1-based line in the source text, 0 when the error is not tied to a file.
  std::size_t line() const noexcept { return line_; }
  // Offending node or element index, -1 if not applicable.
  long item() const noexcept { return item_; }

private:
  MeshErrorKind kind_;
  std::size_t line_;
  long item_;
};

}  // namespace springfem
