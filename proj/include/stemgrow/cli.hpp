#pragma once

namespace stemgrow {

// Command-line entry point. Exit codes: 0 success, 1 config/usage error,
// 2 breakdown termination, 3 push failure.
int cli_main(int argc, const char* const* argv);

}  // namespace stemgrow
