#pragma once

#include <string>

#include "evykit/config.hpp"

// CLI command bodies. Each writes its report files into out_dir and throws
// on failure: config_error for missing/invalid configuration, io_error for
// file problems, std::domain_error for violated mathematical preconditions.
// The evykit binary maps these to exit codes 2, 4 and 3 respectively.

namespace evy {

void cmd_evy(const RunConfig& config, const std::string& out_dir);
void cmd_kernel(const RunConfig& config, const std::string& out_dir);
void cmd_fit(const RunConfig& config, const std::string& data_csv,
             const std::string& out_dir);
void cmd_simulate(const RunConfig& config, const std::string& out_dir);
void cmd_msy(const RunConfig& config, const std::string& out_dir);
void cmd_audit(const RunConfig& config, const std::string& data_csv,
               const std::string& out_dir);

}  // namespace evy
