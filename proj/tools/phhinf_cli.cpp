#include "phhinf/cli.hpp"

int main(int argc, char** argv) { return phhinf::cli::run(argc, argv); }
