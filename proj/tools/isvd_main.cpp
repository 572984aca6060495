#include "isvd/cli.hpp"

int main(int argc, char** argv) { return isvd::cli_main(argc, argv); }
