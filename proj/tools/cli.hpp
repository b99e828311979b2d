#pragma once

#include <string>
#include <vector>

namespace tailwave::cli {

enum ExitCode : int { kPass = 0, kError = 1, kVerdictFail = 2, kUsage = 64, kConfig = 65 };

/// Entry point shared by the executable and the tests.
int main(int argc, const char* const* argv);
int main(const std::vector<std::string>& args);

}  // namespace tailwave::cli
