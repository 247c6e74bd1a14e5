#include "varopt/cli.hpp"

int main(int argc, char** argv) { return varopt::run_command(argc, argv); }
