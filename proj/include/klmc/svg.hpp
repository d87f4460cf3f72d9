// Minimal hand-emitted SVG line charts (axes, tick labels, legend). No
// dependencies, bit-reproducible output.
#pragma once

#include <string>
#include <vector>

namespace klmc {

class LinePlot {
 public:
  LinePlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void set_log_x(bool on) { log_x_ = on; }
  void set_log_y(bool on) { log_y_ = on; }
  void add_series(std::string name, std::vector<double> xs, std::vector<double> ys);
  void write(const std::string& path) const;

 private:
  std::string title_, xlabel_, ylabel_;
  bool log_x_ = false, log_y_ = false;
  struct Series {
    std::string name;
    std::vector<double> xs, ys;
  };
  std::vector<Series> series_;
};

}  // namespace klmc
