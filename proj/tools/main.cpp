#include "cli/app.hpp"

int main(int argc, char** argv) { return sojourn::cli::run_cli(argc, argv); }
