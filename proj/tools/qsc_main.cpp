#include "qsc/cli.hpp"

int main(int argc, char** argv) { return qsc::cli::cli_main(argc, argv); }
