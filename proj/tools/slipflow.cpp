#include "slipflow/cli.hpp"

int main(int argc, char** argv) { return slipflow::cli::main(argc, argv); }
