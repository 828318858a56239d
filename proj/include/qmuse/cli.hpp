#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "qmuse/qsim.hpp"

namespace qmuse::cli {

/// "local", "remote" (QMUSE_ENDPOINT or the default port) or "remote:HOST:PORT".
std::shared_ptr<qsim::Backend> make_backend(const std::string& spec);

/// Text of the CX and Toffoli truth tables, computed by the simulator.
std::string gate_tables();

/// Entry point for the qmuse tool. args excludes the program name.
/// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace qmuse::cli
