#include "plgraph/cli.hpp"

int main(int argc, char** argv) { return plgraph::run_cli(argc, argv); }
