#pragma once

namespace ispec {

// Command line entry point. Exit codes: 0 = ran (verdicts are in the
// manifest), 2 = configuration problem, 3 = certificate failure,
// 4 = no convergence, 5 = missing artifact, 1 = unexpected error.
int cli_main(int argc, char** argv);

}  // namespace ispec
