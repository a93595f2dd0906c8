#include "gbs/io.hpp"

int main(int argc, char** argv) { return gbs::cli_main(argc, argv); }
