#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace ftaq {

struct SourcePos {
  int line = 0;
  int col = 0;
  bool valid() const { return line > 0; }
};

enum class ErrorClass {
  io,
  parse,
  validation,
  unknown_element,
  cross_side,
  missing_attribute,
  conditioning_on_null,
  guard_exceeded,
  invalid_query,
};

std::string_view error_class_name(ErrorClass cls);

/// Library-wide error type. `pos` is set for errors that can be traced to a
/// location in a model or script source.
class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string message, std::optional<SourcePos> pos = std::nullopt)
      : std::runtime_error(format(cls, message, pos)), cls_(cls), pos_(pos), message_(std::move(message)) {}

  ErrorClass cls() const { return cls_; }
  const std::optional<SourcePos>& pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  static std::string format(ErrorClass cls, const std::string& msg, const std::optional<SourcePos>& pos);

  ErrorClass cls_;
  std::optional<SourcePos> pos_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorClass cls, std::string message, std::optional<SourcePos> pos = std::nullopt) {
  throw Error(cls, std::move(message), pos);
}

}  // namespace ftaq
