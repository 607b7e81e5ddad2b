#pragma once

namespace vsal {

// Batch front-end entry point. Exit code 0 on success, 1 when some files
// failed, 2 on usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace vsal
