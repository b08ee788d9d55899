#pragma once

#include <string>
#include <vector>

namespace scnd::cli {

/// Process exit codes.
enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kConfig = 2,
    kInfeasible = 3,
    kTimeout = 4,
    kDegenerate = 5,
};

/// Entry point of the `scnd` command. Never throws; every error becomes an
/// exit code and a message on stderr.
int run(int argc, char** argv);

/// Same as above with the program name omitted from `args`.
int run(const std::vector<std::string>& args);

}  // namespace scnd::cli
