#include "qexcl/cli.hpp"

int main(int argc, char** argv) { return qexcl::run_cli(argc, argv); }
