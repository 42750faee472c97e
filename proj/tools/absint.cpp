#include "absint/cli.hpp"

int main(int argc, char** argv) { return absint::run_cli(argc, argv); }
