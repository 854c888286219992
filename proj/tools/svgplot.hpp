#pragma once

// Self-contained SVG line charts for the training curves: two panels
// (accuracy and loss), polylines plus axes, no dependencies.

#include <array>
#include <string>
#include <vector>

namespace cli {

// One row per epoch: {train_loss, train_acc, val_loss, val_acc}.
std::string training_curves_svg(const std::vector<std::array<double, 4>>& rows);

void write_training_curves_svg(const std::string& path,
                               const std::vector<std::array<double, 4>>& rows);

}  // namespace cli
