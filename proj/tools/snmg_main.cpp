#include "snmg/cli/driver.hpp"

int main(int argc, char** argv) { return snmg::run(argc, argv); }
