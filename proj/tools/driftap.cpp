#include "driftap/cli.hpp"

int main(int argc, char** argv) { return driftap::cli::main_entry(argc, argv); }
