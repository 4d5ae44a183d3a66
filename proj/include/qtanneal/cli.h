#ifndef QTANNEAL_CLI_H_
#define QTANNEAL_CLI_H_

#include <iosfwd>

namespace qtanneal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

// Entry point of the qtanneal command-line tool. Returns 0 on success, 1 on
// a domain error (bad image, degenerate input, no qualifying table) and 2 on
// a usage error.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtanneal

#endif  // QTANNEAL_CLI_H_
