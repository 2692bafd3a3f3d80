#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netgrab/pipeline.hpp"

namespace netgrab {

struct BatchEntry {
  std::string name;  // input file name
  bool ok = true;
  std::string stage;
  std::string message;
  double milliseconds = 0.0;
};

struct BatchReport {
  /// Sorted by input file name.
  std::vector<BatchEntry> entries;
  double total_milliseconds = 0.0;

  std::size_t failures() const;
};

/// Run `pipeline` over every *.png in `input_dir`, writing one subdirectory
/// per image stem into `output_dir`. Images are independent: a failure is
/// recorded in the report and never stops the batch. Throws Error(IoError)
/// only when a directory cannot be read or created.
BatchReport run_batch(const Pipeline& pipeline, const std::filesystem::path& input_dir,
                      const std::filesystem::path& output_dir, int parallelism, const OutputOptions& options = {});

}  // namespace netgrab
