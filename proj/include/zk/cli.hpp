#pragma once

#include <string>
#include <vector>

namespace zk {

// Full command-line entry point (the zk binary is a one-line wrapper around it).
int cli_main(int argc, const char* const* argv);

// In-process variant for tests; args exclude the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace zk
