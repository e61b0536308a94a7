#include "satcl/cli.hpp"

int main(int argc, char** argv) { return satcl::cli(argc, argv); }
