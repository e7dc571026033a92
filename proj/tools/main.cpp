#include "cli.hpp"

int main(int argc, char** argv) { return signglm::cli::run_main(argc, argv); }
