#pragma once

namespace isvd {

/// Entry point of the `isvd` command-line tool. Subcommands: lp, nc, svd, bench.
int cli_main(int argc, char** argv);

}  // namespace isvd
