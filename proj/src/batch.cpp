#include "netgrab/batch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include <omp.h>

#include "netgrab/png_io.hpp"

namespace netgrab {

std::size_t BatchReport::failures() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const BatchEntry& e) { return !e.ok; }));
}

namespace {

BatchEntry process_one(const Pipeline& pipeline, const std::filesystem::path& input,
                       const std::filesystem::path& out_dir, const OutputOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  BatchEntry entry;
  entry.name = input.filename().string();
  std::string step = "load";
  try {
    RgbImage image = load_png(input);
    const RunResult result = run_pipeline(pipeline, image, {options.intermediates, {}});
    step = "write";
    write_run_outputs(result, out_dir, options);
    if (!result.status.ok) {
      entry.ok = false;
      entry.stage = result.status.stage;
      entry.message = result.status.message;
    }
  } catch (const std::exception& e) {
    entry.ok = false;
    entry.stage = step;
    entry.message = e.what();
  }
  entry.milliseconds = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return entry;
}

}  // namespace

BatchReport run_batch(const Pipeline& pipeline, const std::filesystem::path& input_dir,
                      const std::filesystem::path& output_dir, int parallelism, const OutputOptions& options) {
  if (parallelism < 1) throw Error(ErrorKind::InvalidParameter, "parallelism must be >= 1");
  std::error_code ec;
  if (!std::filesystem::is_directory(input_dir, ec)) {
    throw Error(ErrorKind::IoError, "input directory not readable: " + input_dir.string());
  }
  std::vector<std::filesystem::path> inputs;
  std::filesystem::directory_iterator it(input_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot list " + input_dir.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.is_regular_file(ec) && entry.path().extension() == ".png") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + output_dir.string() + ": " + ec.message());

  const auto t0 = std::chrono::steady_clock::now();
  BatchReport report;
  report.entries.resize(inputs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&](bool single_threaded_kernels) {
    if (single_threaded_kernels) omp_set_num_threads(1);
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      report.entries[i] = process_one(pipeline, inputs[i], output_dir / inputs[i].stem(), options);
    }
  };
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(parallelism, std::max<std::size_t>(inputs.size(), 1)));
  if (workers <= 1) {
    worker(false);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, true);
    for (auto& t : pool) t.join();
  }
  report.total_milliseconds = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace netgrab
