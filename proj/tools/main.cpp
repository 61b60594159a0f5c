#include "app/dispatch.hpp"

int main(int argc, char** argv) { return treelab::app::run_cli(argc, argv); }
