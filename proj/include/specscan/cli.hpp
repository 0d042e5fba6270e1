#pragma once

// Command-line front end. Modes: index, train, classify, evaluate.
// Exit codes: 0 success, 1 usage, 2 I/O, 3 validation or malformed input.

namespace specscan::cli {

int run(int argc, const char* const* argv);

}  // namespace specscan::cli
