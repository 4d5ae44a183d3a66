#include <iostream>

#include "qtanneal/cli.h"

int main(int argc, char** argv) { return qtanneal::RunCli(argc, argv, std::cout, std::cerr); }
