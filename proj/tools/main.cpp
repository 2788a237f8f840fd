#include "ispec/cli.hpp"

int main(int argc, char** argv) { return ispec::cli_main(argc, argv); }
