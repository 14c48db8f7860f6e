#pragma once

namespace hyplab {

// Full command-line entry point: parses argv, runs the requested suite, writes
// the report.  Returns the process exit status: 0 when every certified check
// in the run passed, 1 on a failed certification (or divergence flag), 2 on
// engine errors (bad model, cap exceeded, resolution), parse errors as CLI11
// reports them.
int run_cli(int argc, const char* const* argv);

}  // namespace hyplab
