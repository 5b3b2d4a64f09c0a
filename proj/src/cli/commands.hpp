#pragma once

#include <cstdint>
#include <string>

namespace bmcli {

struct CliOptions {
  std::string config_path;
  std::string out_dir;        // empty: use config [output] directory
  std::string input_path;     // render only
  bool seed_set = false;
  uint64_t seed = 0;
  int jobs = 1;
  int grid_n_x = 0;           // 0: use config
  int grid_n_p = 0;
  double span = 0.0;          // 0: use config
};

// Exit codes: 0 success, 1 usage/config error, 2 numerical failure.
int cmd_derive(const CliOptions& opt);
int cmd_steady(const CliOptions& opt);
int cmd_match(const CliOptions& opt);
int cmd_transfer(const CliOptions& opt);
int cmd_sweep(const CliOptions& opt);
int cmd_spectrum(const CliOptions& opt);
int cmd_oracle_check(const CliOptions& opt);
int cmd_render(const CliOptions& opt);

}  // namespace bmcli
