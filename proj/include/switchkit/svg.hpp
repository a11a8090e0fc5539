#pragma once

#include <string>
#include <vector>

namespace switchkit::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool step = false;  // draw as a right-continuous step function
};

struct Panel {
    std::string title;
    std::vector<Series> series;
};

/// Panels stacked vertically, each with axes, tick labels and polylines.
std::string render(const std::vector<Panel>& panels, int width = 720, int panel_height = 220);

void write_file(const std::string& path, const std::string& content);

}  // namespace switchkit::svg
