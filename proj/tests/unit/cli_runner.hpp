#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <string>

namespace oracle {

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

// Runs the confloc binary with the given arguments; stdout goes to `out`
// when set. Returns the process exit status.
inline int run_tool(std::initializer_list<std::string> args, const std::filesystem::path& out = {}) {
  std::string cmd = shell_quote(CONFLOC_TOOL);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += out.empty() ? " >/dev/null" : " >" + shell_quote(out.string());
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace oracle
