//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/cli.hpp"

int main(int argc, char **argv) { return xpct::cli_main(argc, argv); }
