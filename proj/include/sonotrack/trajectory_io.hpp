// SPDX-License-Identifier: Apache-2.0
//
// Trajectory file (JSON, coordinates in meters, 6 decimals):
//   {"rate": 25.000000, "points": [[x, y, z], ...]}
//
// Grid annotation file (manual ground truth, one cell per second):
//   {"rate": 1.0, "cells": [[col, row], [col, row, depth_m], ...]}
// Columns and rows are 1-based over the coarse grid; depth defaults to the
// first depth bin. Annotations load as a trajectory of coarse positions.
#pragma once

#include "sonotrack/geometry.hpp"

#include <filesystem>
#include <string>

namespace sonotrack {

std::string trajectory_to_json(const Trajectory3D& traj);
Trajectory3D trajectory_from_json(const std::string& text);

void save_trajectory(const Trajectory3D& traj, const std::filesystem::path& path);
Trajectory3D load_trajectory(const std::filesystem::path& path);

/// Loads either a trajectory file or a grid annotation file.
Trajectory3D load_trajectory_or_annotation(const std::filesystem::path& path,
                                           const GridScheme& scheme = {});

} // namespace sonotrack
