#include "cylmin/cli.hpp"

int main(int argc, char** argv) { return cylmin::cli::run(argc, argv); }
