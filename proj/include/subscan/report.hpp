#ifndef SUBSCAN_REPORT_HPP_
#define SUBSCAN_REPORT_HPP_

#include "subscan/evaluation.hpp"
#include "subscan/scan.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <string_view>

namespace subscan {

enum class OutputFormat { json, text };

OutputFormat parse_output_format(std::string_view text);

nlohmann::json to_json(const ScanResult& result);
ScanResult scan_result_from_json(const nlohmann::json& j);

std::string format_scan_result(const ScanResult& result, OutputFormat format);
std::string format_scan_results(std::span<const ScanResult> results, OutputFormat format);

/// Table-1-shaped AUC grid (one column per proportion plus "Indv.") with
/// cardinality summaries and the raw group scores.
std::string format_eval_report(const EvalReport& report, OutputFormat format);

/// CSV: condition,proportion,axis,size,count.
std::string format_cardinality_table(const EvalReport& report);

/// CSV: sample_id,label,pc1,pc2. pc2 is 0 when only one component exists.
std::string format_pca_table(const LabeledPool& pool, const PcaProjection& projection);

}  // namespace subscan

#endif  // SUBSCAN_REPORT_HPP_
