// Trace serialization: a JSON document with the run parameters and
// per-snapshot diagnostics, plus a CSV state dump with columns
// iteration,chain,coordinate,x,v. Output is byte-deterministic for equal
// seeds; wall-clock metadata never reaches the files. Every CSV starts with
// a header row and a config-hash comment line.
#pragma once

#include <cstdint>
#include <string>

#include "klmc/sampler.hpp"

namespace klmc {

// FNV-1a, used to stamp output files with the configuration they came from.
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);

// config_json: the original config document echoed into the trace file
// (empty -> "{}").
void write_trace_json(const std::string& path, const Trace& trace,
                      const std::string& config_json);

// final_only limits the dump to the last snapshot (full ensembles can be
// large); diagnostics for every snapshot are always in the JSON.
void write_trace_csv(const std::string& path, const Trace& trace,
                     std::uint64_t config_hash, bool final_only = false);

// Generic CSV writer for experiment tables: header columns + rows.
void write_csv(const std::string& path, std::uint64_t config_hash,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double x);  // shortest round-trip decimal

}  // namespace klmc
