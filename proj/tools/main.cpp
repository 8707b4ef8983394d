#include <iostream>

#include "cli/experiment.hpp"

int main(int argc, char** argv) { return tkml::cli::run_cli(argc, argv, std::cout, std::cerr); }
