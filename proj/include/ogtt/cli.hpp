#ifndef OGTT_CLI_HPP
#define OGTT_CLI_HPP

#include <iosfwd>

namespace ogtt {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutDirEnv = "OGTT_OUT_DIR";

/// Entry point of the `ogtt` tool:
///
///   ogtt fit <obs.csv> [--config <file>] [--out <dir>]
///   ogtt simulate --theta0 X --theta1 X --theta2 X --g0 X [--t-end 3] [--grid-step 0.05]
///   ogtt sbc [--replicates 100] [--iterations N] [--seed S] [--out <dir>]
///   ogtt recover [--profile healthy|resistant] [--replicates 50] [--iterations N] [--seed S]
///
/// Returns 0 on success; otherwise prints a one-line diagnostic to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ogtt

#endif  // OGTT_CLI_HPP
