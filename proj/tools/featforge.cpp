#include "featforge/controller.hpp"

int main(int argc, char** argv) { return featforge::run_cli(argc, argv); }
