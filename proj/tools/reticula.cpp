#include "reticula/commands.hpp"

int main(int argc, char** argv) { return reticula::cli::run(argc, argv); }
