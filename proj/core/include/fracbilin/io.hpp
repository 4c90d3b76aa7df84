#pragma once

#include "fracbilin/grid.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fracbilin {

/// CSV with header "t,x,value", one row per (time level, node), 17
/// significant digits, '.' decimal separator, LF line endings.
std::string field_csv_string(const Field& f, const Grid& g, const TimeGrid& tg);
void write_field_csv(const std::string& path, const Field& f, const Grid& g, const TimeGrid& tg);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

std::string iso8601_utc_now();

void write_text_file(const std::string& path, const std::string& content);

/// Creates the directory (parents included).  An existing non-empty
/// directory is refused unless overwrite is set; with overwrite the
/// directory is reused in place, files are overwritten as they are written.
void prepare_out_dir(const std::string& path, bool overwrite);

void write_manifest(const std::string& dir, const std::string& config_hash,
                    const std::string& command, const std::vector<std::string>& outputs,
                    const std::string& started, const std::string& finished);

/// Index-merged parallel loop: body(i) once for each i in [0, n).  Thread
/// count = min(n, hardware, FRACBILIN_THREADS when set).  The first
/// exception from any body is rethrown after the join.  Callers keep
/// determinism by writing results into per-index slots.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace fracbilin
