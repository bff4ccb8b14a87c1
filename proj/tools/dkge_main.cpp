#include "dkge/cli.hpp"

int main(int argc, char** argv) { return dkge::cli::run(argc, argv); }
