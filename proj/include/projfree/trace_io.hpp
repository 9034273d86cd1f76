#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "projfree/optimizers.hpp"

namespace projfree {

inline constexpr const char* kTraceHeader = "t,loss_f,loss_h,fw_gap,gamma,batch,grad_norm,step_ms,oracle_ms,proj_ms";

/// One CSV row per record; absent fields are written as empty cells.
/// Reals use %.17g so parsing restores the exact doubles.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records);
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& records);

std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

}  // namespace projfree
