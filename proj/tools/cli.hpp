#pragma once

#include <string>
#include <vector>

// Command-line front end. Exit-code contract (scriptable):
//   0 ok | 1 input error | 2 non-convergence | 3 guard refusal | 4 schema mismatch

namespace signglm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitGuard = 3;
inline constexpr int kExitSchema = 4;

inline constexpr const char* kVersion = "0.1.0";

// args excludes the program name: {"fit", "--loss", "logistic", "data.csv"}
int run(const std::vector<std::string>& args);

int run_main(int argc, const char* const* argv);

}  // namespace signglm::cli
