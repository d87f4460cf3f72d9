#include "klmc/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace klmc {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trace_json(const std::string& path, const Trace& trace,
                      const std::string& config_json) {
  nlohmann::json j;
  j["config"] = config_json.empty() ? nlohmann::json::object()
                                    : nlohmann::json::parse(config_json);
  j["dim"] = trace.dim;
  j["chains"] = trace.chains;
  j["seed"] = trace.seed;
  j["stride"] = trace.stride;
  j["sigma2"] = trace.sigma2;
  nlohmann::json eps = nlohmann::json::array();
  for (const auto& [delta, n] : trace.epochs) eps.push_back({{"delta", delta}, {"n", n}});
  j["epochs"] = eps;
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : trace.diagnostics) {
    diags.push_back({{"iteration", d.iteration},
                     {"mean_v2", d.mean_v2},
                     {"mean_x", d.mean_x},
                     {"var_x", d.var_x}});
  }
  j["diagnostics"] = diags;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

void write_trace_csv(const std::string& path, const Trace& trace,
                     std::uint64_t config_hash, bool final_only) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# config " << hash_hex(config_hash) << "\n";
  out << "iteration,chain,coordinate,x,v\n";
  std::size_t first = final_only && !trace.snapshots.empty() ? trace.snapshots.size() - 1 : 0;
  for (std::size_t s = first; s < trace.snapshots.size(); ++s) {
    const auto& snap = trace.snapshots[s];
    for (int c = 0; c < snap.state.chains; ++c) {
      auto xs = snap.state.chain_x(c);
      auto vs = snap.state.chain_v(c);
      for (int j = 0; j < snap.state.dim; ++j) {
        out << snap.iteration << ',' << c << ',' << j << ',' << format_double(xs[j]) << ','
            << format_double(vs[j]) << "\n";
      }
    }
  }
}

void write_csv(const std::string& path, std::uint64_t config_hash,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# config " << hash_hex(config_hash) << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

}  // namespace klmc
