#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsc/mc.hpp"

namespace qsc::cli {

// exit codes: 0 ok, 1 validation error, 2 verification failure
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitVerification = 2;

int cli_main(int argc, const char* const* argv);

// runs CSV: '# config {json}' header line, then one row per run with the
// prefix-count columns breadth first in alphabet order
struct RunsFile {
    std::string config_json;
    std::vector<std::string> columns;
    std::vector<mc::RunRecord> records;
};

std::string runs_csv_text(const std::string& config_json, const SourceModel& source,
                          size_t trie_depth, const std::vector<mc::RunRecord>& records);
RunsFile read_runs_csv(const std::string& path);

}  // namespace qsc::cli
