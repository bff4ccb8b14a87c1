#pragma once

namespace dkge::cli {

// Entry point shared by the `dkge` binary and in-process tests. argv[1]
// selects the subcommand (prepare / train / train-baseline / quantize /
// eval / report); returns the process exit status.
int run(int argc, const char* const* argv);

}  // namespace dkge::cli
