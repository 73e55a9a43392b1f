#pragma once

namespace perdyn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDivergence = 3;

int run_cli(int argc, char** argv);

}  // namespace perdyn
