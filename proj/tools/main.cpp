#include "nlsfloquet/cli.hpp"

int main(int argc, char** argv) { return nlsf::cli_main(argc, argv); }
