#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oce/trainer.hpp"

namespace oce {

/// One nonnegative decimal per line, optionally preceded by a single `loss`
/// header line. Blank lines are skipped. Throws ParseError with the offending
/// line number, IoError when the file cannot be read.
std::vector<double> parse_loss_csv(std::string_view text);
std::vector<double> read_loss_csv(const std::filesystem::path& path);

/// Comma-separated rows of nonnegative decimals, one hypothesis per row.
std::vector<std::vector<double>> parse_loss_matrix(std::string_view text);
std::vector<std::vector<double>> read_loss_matrix(const std::filesystem::path& path);

struct ExperimentConfig {
  SyntheticTask task;
  TrainConfig train;
};

/// JSON document {"task": {...SyntheticTask fields...}, "train": {...}}.
/// The objective is {"kind": "erm"|"eom"|"eim"|"svp", "spec": "...",
/// "penalty_lambda": x}. Absent fields keep their defaults; unknown fields are
/// rejected.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace oce
