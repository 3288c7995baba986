#include "lcflow/cli.hpp"

int main(int argc, char** argv) { return lcflow::cli(argc, argv); }
