#include "cli.hpp"

int main(int argc, char** argv) { return ordo::cli_main(argc, argv); }
