#pragma once

#include <ostream>
#include <string>

namespace robust_interp {

struct CliOptions {
    std::string config_path;
    std::string controller_path;  // required by verify, optional for regions
    std::string out_dir = ".";
    bool quiet = false;
};

// Exit codes: 0 passed, 2 Pick test failed (synthesize only), 1 error or
// failed verification.
int cmd_synthesize(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_regions(const CliOptions& opts, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robust_interp
