#include "sgns/cli.hpp"

int main(int argc, char** argv) { return sgns::run_command_line(argc, argv); }
