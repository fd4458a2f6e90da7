#include "lpqr/cli.hpp"

int main(int argc, char** argv) { return lpqr::cli_main(argc, argv); }
