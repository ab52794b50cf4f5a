#pragma once

#include <iosfwd>
#include <string>

#include "dimer/spectral_core.hpp"

namespace dimer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// "1", "-0.25", "0.3i", "0.8+0.3i", "1e-2-2.5e-1i". Throws InvalidArgument.
cplx parse_complex(const std::string& text);

/// Full command line (argv[0] included). Report goes to `out` unless --output
/// names a file; diagnostics go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dimer::cli
