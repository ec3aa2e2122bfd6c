// sedkit/cli.h
//
// Command-line front end. Every subcommand writes a JSON run manifest next
// to its outputs; `sedkit replay <manifest>` re-runs it and checks that the
// outputs are byte-identical.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 internal error.

#ifndef SEDKIT_CLI_H_
#define SEDKIT_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sedkit::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInternal = 2;

/// Raised when an internal consistency check fails; maps to exit code 2.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

}  // namespace sedkit::cli

#endif  // SEDKIT_CLI_H_
