#include "wavegraph/cli.hpp"

int main(int argc, char** argv) { return wavegraph::run_cli(argc, argv); }
