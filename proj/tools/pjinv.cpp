#include "pjinv/cli.hpp"

int main(int argc, char** argv) { return pjinv::cli::main_entry(argc, argv); }
