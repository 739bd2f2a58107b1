#include "jitminer/cli.hpp"

int main(int argc, char **argv) { return jitminer::run_cli(argc, argv); }
