#include "experiment.hpp"

int main(int argc, char** argv) { return sslab::cli::cli_main(argc, argv); }
