#include "annealed_ldp/cli.hpp"

int main(int argc, char** argv) { return annealed_ldp::cli::run_main(argc, argv); }
