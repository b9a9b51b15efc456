#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "posewatch/error.hpp"

namespace posewatch {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitTrainingData = 3;
inline constexpr int kExitSchema = 4;
inline constexpr int kExitSink = 5;

int exit_code_for(ErrorCode code);

// Entry point behind the posewatch executable. `args` excludes the program
// name. Standard input is only read by `stream --input -`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace posewatch
