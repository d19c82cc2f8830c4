#include "esc/cli.hpp"

int main(int argc, char** argv)
{
  return esc::cli_main(argc, argv);
}
