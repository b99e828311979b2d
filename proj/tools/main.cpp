#include "cli.hpp"

int main(int argc, char** argv) { return tailwave::cli::main(argc, argv); }
