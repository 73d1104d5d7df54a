#pragma once

#include <string>

#include "submaslov/scenarios.hpp"

namespace submaslov {

/// Number formatted with 12 significant digits, '.' decimal separator.
std::string format_significant(double v);

/// Focal CSV with the fixed column order
/// t_focal,kernel_dim,contribution_num,contribution_den,level,flags.
/// Rows sorted by level then t; byte-deterministic for identical inputs.
std::string render_csv(const ScenarioResult& result);

/// Human-readable run summary.
std::string render_summary(const ScenarioResult& result);

/// Machine-readable result document (JSON).
std::string render_json(const ScenarioResult& result);

/// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace submaslov
