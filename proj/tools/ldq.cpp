#include "ldq/cli.hpp"

int main(int argc, char** argv) { return ldq::cli::run(argc, argv); }
