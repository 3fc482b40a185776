#include "algca/cli.hpp"

int main(int argc, char** argv) { return algca::run(argc, argv); }
