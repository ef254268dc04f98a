// spinbath command-line entry point.

#include "spinbath/cli.hpp"

int main(int argc, char** argv) { return spinbath::experiments::cli_main(argc, argv); }
