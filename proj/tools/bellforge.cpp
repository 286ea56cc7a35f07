#include "bellforge/cli.hpp"

int main(int argc, char** argv) { return bellforge::run_cli(argc, argv); }
