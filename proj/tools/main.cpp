#include "stemgrow/cli.hpp"

int main(int argc, char** argv) { return stemgrow::cli_main(argc, argv); }
