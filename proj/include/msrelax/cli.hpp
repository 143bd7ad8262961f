#pragma once

#include <iosfwd>

// Command-line front end:
//   simulate --config FILE [--set key=value]... [--output-dir DIR]
//   checks --suite a,b,... [--n N] [--seed S] [--trajectory FILE]
//   hminus A.msrc B.msrc [--grid G] [--direct-grid G]
//   potential-table --L L [--n N]
//   norms CURVE.msrc
//   report TRAJECTORY.csv
// Exit codes: 0 success, 1 failed hard assertion or halted run, 2 usage error.
namespace msrelax::cli {

int main(int argc, char** argv, std::ostream& out, std::ostream& err);

// Worker cap from MSRELAX_THREADS (default: hardware concurrency, at least 1).
int worker_count();

}  // namespace msrelax::cli
