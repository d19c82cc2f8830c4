#ifndef ESC_CLI_HPP
#define ESC_CLI_HPP

#include <ostream>

namespace esc
{

/// Entry point of esc_cli. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

}  // namespace esc

#endif  // ESC_CLI_HPP
