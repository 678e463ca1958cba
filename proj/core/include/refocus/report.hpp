#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "refocus/evaluation.hpp"

namespace refocus {

/// Report JSON with keys config, clean_oa, corruptions, ce, mce,
/// focus_histograms, focus_success. Floats carry 6 decimals.
[[nodiscard]] std::string report_json(const EvalReport& report);

/// Writes report.json plus CSV mirrors (corruptions.csv, ce.csv,
/// focus_histograms.csv, focus_success.csv, diagnostics.csv) into `dir`.
void write_report(const std::filesystem::path& dir, const EvalReport& report);

/// Markdown summary of a report.json document. Throws ParseError on
/// malformed input.
[[nodiscard]] std::string render_report(std::string_view json_text, const std::string& origin = "<memory>");

}  // namespace refocus
