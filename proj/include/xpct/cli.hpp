//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xpct {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `xpct` tool: simulate | retrieve | reconstruct |
/// evaluate. args[0] is the program name.
int cli_main(const std::vector<std::string> &args, std::ostream &out,
             std::ostream &err);

int cli_main(int argc, char **argv);

} // namespace xpct
