#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lattgen {

// Error classes map 1:1 onto CLI exit codes.
enum class ErrorClass : int {
  Spec = 2,        // malformed lattice document
  Expression = 3,  // expression parse/evaluation failure
  Parameter = 4,   // parameter validation failure
  Meshing = 5,     // field sampling / polygonization failure
  Io = 6,          // filesystem and serialization failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg) : std::runtime_error(msg), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

// Syntax error; offset is the byte position in the source text.
class ExprParseError : public Error {
 public:
  ExprParseError(const std::string& msg, std::size_t offset)
      : Error(ErrorClass::Expression,
              msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ExprEvalError : public Error {
 public:
  explicit ExprEvalError(const std::string& msg) : Error(ErrorClass::Expression, msg) {}
};

class SpecError : public Error {
 public:
  explicit SpecError(const std::string& msg) : Error(ErrorClass::Spec, msg) {}
};

class ParamError : public Error {
 public:
  explicit ParamError(const std::string& msg) : Error(ErrorClass::Parameter, msg) {}
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& msg) : Error(ErrorClass::Meshing, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorClass::Io, msg) {}
};

}  // namespace lattgen
