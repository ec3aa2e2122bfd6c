// sedkit/errors.h

#ifndef SEDKIT_ERRORS_H_
#define SEDKIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sedkit {

/// Malformed user input. Carries the offending source (file name or a
/// descriptive tag) and a 1-based line number when one applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(format(source, line, what)), source_(source), line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& what) {
    std::string msg = source;
    if (line > 0) msg += ":" + std::to_string(line);
    return msg + ": " + what;
  }

  std::string source_;
  std::size_t line_;
};

}  // namespace sedkit

#endif  // SEDKIT_ERRORS_H_
