#pragma once
// Command-line front end. Exit codes: 0 success, 2 configuration or usage
// error, 3 runtime failure, 4 verification failure.

namespace cli {

int run_main(int argc, char** argv);

}  // namespace cli
