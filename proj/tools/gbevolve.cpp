#include "gbevolve/io.hpp"

int main(int argc, char** argv) { return gbevolve::cli_main(argc, argv); }
