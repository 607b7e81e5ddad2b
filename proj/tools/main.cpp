#include "vsal/cli.hpp"

int main(int argc, char** argv) { return vsal::run_cli(argc, argv); }
