#include "ofw/cli.hpp"

int main(int argc, char** argv) { return ofw::cli::run_cli(argc, argv); }
