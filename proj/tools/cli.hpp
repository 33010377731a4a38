#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ordo {

// Exit codes: 0 success, 1 check or verification failure, 2 usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace ordo
