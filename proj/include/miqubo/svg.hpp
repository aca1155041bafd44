#pragma once

#include <string>
#include <vector>

namespace miqubo::svg {

/// Vertical bars in the given order.
std::string bar_chart(const std::vector<std::string>& labels, const std::vector<double>& values,
                      const std::string& title, const std::string& y_label);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> spread;  // drawn as a mean +/- spread band
};

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

}  // namespace miqubo::svg
