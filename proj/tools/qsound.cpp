#include "commands.hpp"

int main(int argc, char** argv) { return qsound::cli::run_cli(argc, argv); }
