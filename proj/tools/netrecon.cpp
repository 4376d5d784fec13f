#include "netrecon/cli.hpp"

int main(int argc, char** argv) { return netrecon::run_cli(argc, argv); }
