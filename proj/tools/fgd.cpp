#include "fgd/cli.hpp"

int main(int argc, char** argv) { return fgd::cli::cli_main(argc, argv); }
