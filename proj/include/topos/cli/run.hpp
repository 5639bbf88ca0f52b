#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace topos::cli {

/// Runs one workbench invocation (arguments without the program name).
/// Returns 0 when the verdict passes, 1 when it fails, 2 on usage or load errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The bundled document gallery.
std::filesystem::path default_fixture_dir();

}  // namespace topos::cli
