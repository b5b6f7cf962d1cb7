#include "copula_lab/copula_lab.h"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

// One line on stderr, stable field order: status, line, message.
int report(cl_status status)
{
  std::string message = cl_last_error_message();
  for (char& ch : message)
    if (ch == '\n' || ch == '\r')
      ch = ' ';
  std::fprintf(stderr,
               "error: status=%s line=%zu message=\"%s\"\n",
               cl_status_name(status),
               cl_last_error_line(),
               message.c_str());
  return static_cast<int>(status);
}

struct ConfigHandle
{
  cl_config* ptr = nullptr;
  ~ConfigHandle() { cl_config_destroy(ptr); }
};

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Kernel copula estimation, LIL deviation simulations and confidence bands" };
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", "copula_lab 1.0.0");

  std::string command;
  app.add_option("command", command, "estimate | simulate | bands | verify")
    ->required()
    ->check(CLI::IsMember({ "estimate", "simulate", "bands", "verify" }));

  std::string config_path;
  app.add_option("--config", config_path, "Base configuration (key=value lines, or any output file)");

  // flag name -> value; flags override the base configuration
  const char* keys[] = { "input",  "out",     "copula",  "theta", "rho",    "estimator",
                         "phi",    "kernel",  "n",       "reps",  "h",      "c",
                         "bn",     "grid-h",  "grid-uv", "epsilon", "seed", "b1",
                         "b2",     "probes",  "draws" };
  std::map<std::string, std::optional<std::string>> flags;
  for (const char* key : keys)
    app.add_option(std::string("--") + key, flags[key]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    std::fprintf(stderr, "error: status=usage line=0 message=\"%s\"\n", e.what());
    return 64;
  }

  ConfigHandle config;
  cl_status status;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr,
                   "error: status=io_error line=0 message=\"cannot open '%s'\"\n",
                   config_path.c_str());
      return CL_IO_ERROR;
    }
    std::ostringstream text;
    text << in.rdbuf();
    status = cl_config_parse(text.str().c_str(), &config.ptr);
  } else {
    status = cl_config_create(&config.ptr);
  }
  if (status != CL_OK)
    return report(status);

  if ((status = cl_config_set(config.ptr, "command", command.c_str())) != CL_OK)
    return report(status);
  for (const auto& [key, value] : flags)
    if (value && (status = cl_config_set(config.ptr, key.c_str(), value->c_str())) != CL_OK)
      return report(status);

  if ((status = cl_run(config.ptr)) != CL_OK)
    return report(status);
  return 0;
}
