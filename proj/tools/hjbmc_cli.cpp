#include "hjbmc/cli/run.hpp"

int main(int argc, char** argv) { return hjbmc::cli::main_with_args(argc, argv); }
