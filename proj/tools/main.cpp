#include "stclust/cli.hpp"

int main(int argc, char** argv) { return stclust::run_cli(argc, argv); }
