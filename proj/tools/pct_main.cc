#include <iostream>

#include "pct/cli/commands.h"

int main(int argc, char** argv) { return pct::RunCli(argc, argv, std::cout, std::cerr); }
