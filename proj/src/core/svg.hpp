#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace epochdd::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_x = true;
    bool log_y = false;
    int width = 760;
    int height = 440;
};

// Self-contained polyline chart with axes, tick labels and a legend; no
// plotting dependency.
void write_line_plot(const std::filesystem::path& path, const PlotSpec& spec,
                     const std::vector<Series>& series);

}  // namespace epochdd::svg
