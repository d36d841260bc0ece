#include "logheston/cli.hpp"

int main(int argc, char** argv) { return logheston::run_cli(argc, argv); }
