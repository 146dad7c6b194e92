#include "arc/bench.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

#include "arc/arc_register.hpp"
#include "arc/bench_driver.hpp"
#include "arc/errors.hpp"
#include "arc/peterson_register.hpp"
#include "arc/rf_register.hpp"
#include "arc/rwlock_register.hpp"

namespace arc {

namespace detail {

void pin_current_thread(unsigned index) noexcept {
#ifdef __linux__
  const unsigned cpus = std::max(1u, std::thread::hardware_concurrency());
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(index % cpus, &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
#else
  (void)index;
#endif
}

}  // namespace detail

std::string_view to_string(BenchMode mode) { return mode == BenchMode::kHold ? "hold" : "work"; }

BenchMode parse_bench_mode(std::string_view name) {
  if (name == "hold") return BenchMode::kHold;
  if (name == "work") return BenchMode::kWork;
  throw ConfigError("unknown mode: " + std::string(name) + " (expected hold or work)");
}

std::size_t parse_size(std::string_view text) {
  std::size_t digits = 0;
  while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
  if (digits == 0) throw ConfigError("bad size: " + std::string(text));
  std::size_t value = std::stoull(std::string(text.substr(0, digits)));
  std::string unit(text.substr(digits));
  std::transform(unit.begin(), unit.end(), unit.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (unit.empty() || unit == "B") return value;
  if (unit == "K" || unit == "KB" || unit == "KIB") return value * 1024;
  if (unit == "M" || unit == "MB" || unit == "MIB") return value * 1024 * 1024;
  throw ConfigError("bad size unit: " + std::string(text));
}

void validate(const BenchConfig& cfg) {
  if (cfg.readers < 1) throw ConfigError("at least one reader is required");
  if (cfg.size < kMinVersionedSize) throw ConfigError("size must be at least 8 bytes");
  if (!(cfg.duration_s >= 0)) throw ConfigError("duration must be non-negative");
  if (cfg.repeat < 1) throw ConfigError("repeat must be at least 1");
  if (cfg.algo == RegisterKind::kRf && cfg.readers > RfRegister::kMaxReaders) {
    throw CapacityError("RF admits at most 58 readers, got " + std::to_string(cfg.readers));
  }
  if (cfg.history_path && !cfg.verify) throw ConfigError("history output requires verify");
}

namespace {

RunOutcome run_once(const BenchConfig& cfg) {
  const std::vector<std::byte> initial = encode_versioned(0, cfg.size);
  switch (cfg.algo) {
    case RegisterKind::kArc: {
      ArcRegister reg(initial, cfg.readers, cfg.size, ArcOptions{cfg.audit});
      return drive_register(reg, cfg);
    }
    case RegisterKind::kRf: {
      RfRegister reg(initial, cfg.readers, cfg.size);
      return drive_register(reg, cfg);
    }
    case RegisterKind::kPeterson: {
      PetersonRegister reg(initial, cfg.readers, cfg.size);
      return drive_register(reg, cfg);
    }
    case RegisterKind::kRwlock: {
      RwlockRegister reg(initial, cfg.readers, cfg.size);
      return drive_register(reg, cfg);
    }
  }
  throw ConfigError("unknown register kind");
}

void merge_stats(RegisterStats& into, const RegisterStats& s) {
  into.reads += s.reads;
  into.writes += s.writes;
  into.rmw.read_rmw += s.rmw.read_rmw;
  into.rmw.write_rmw += s.rmw.write_rmw;
  into.max_read_rmw_per_op = std::max(into.max_read_rmw_per_op, s.max_read_rmw_per_op);
  into.max_scan_length = std::max(into.max_scan_length, s.max_scan_length);
  into.proposal_hits += s.proposal_hits;
  into.no_free_slot += s.no_free_slot;
  into.lemma_violations += s.lemma_violations;
  into.counter_bound_violations += s.counter_bound_violations;
}

}  // namespace

BenchResult run_bench(const BenchConfig& cfg) {
  validate(cfg);
  BenchResult result;
  result.algo = cfg.algo;
  result.mode = cfg.mode;
  result.readers = cfg.readers;
  result.size = cfg.size;
  result.repetitions = cfg.repeat;

  for (unsigned rep = 0; rep < cfg.repeat; ++rep) {
    BenchConfig one = cfg;
    one.seed = cfg.seed + rep;
    RunOutcome run = run_once(one);

    const double elapsed = std::max(run.elapsed_s, 1e-9);
    result.duration_s += run.elapsed_s;
    result.reads += static_cast<double>(run.reads);
    result.writes += static_cast<double>(run.writes);
    result.read_rmw += static_cast<double>(run.stats.rmw.read_rmw);
    result.write_rmw += static_cast<double>(run.stats.rmw.write_rmw);
    result.throughput_ops_s += static_cast<double>(run.reads + run.writes) / elapsed;
    result.read_throughput_ops_s += static_cast<double>(run.reads) / elapsed;
    result.write_throughput_ops_s += static_cast<double>(run.writes) / elapsed;

    result.verification.no_past += run.verification.no_past;
    result.verification.inversions += run.verification.inversions;
    result.verification.torn += run.verification.torn;
    result.verification.corrupted = result.verification.corrupted || run.verification.corrupted;
    result.torn_unrecorded += run.torn_unrecorded;
    merge_stats(result.stats, run.stats);
    result.buffers = run.buffers;

    if (cfg.history_path && rep + 1 == cfg.repeat) {
      std::ofstream out(*cfg.history_path);
      if (!out) throw std::runtime_error("cannot write " + *cfg.history_path);
      write_history(out, run.history);
    }
  }

  const double n = cfg.repeat;
  result.duration_s /= n;
  result.reads /= n;
  result.writes /= n;
  result.read_rmw /= n;
  result.write_rmw /= n;
  result.throughput_ops_s /= n;
  result.read_throughput_ops_s /= n;
  result.write_throughput_ops_s /= n;
  result.violations = result.verification.total() + result.torn_unrecorded +
                      result.stats.lemma_violations + result.stats.counter_bound_violations;
  return result;
}

void emit_csv(std::ostream& out, std::span<const BenchResult> results) {
  out << kCsvHeader << '\n';
  for (const BenchResult& r : results) {
    std::ostringstream row;
    row << to_string(r.algo) << ',' << to_string(r.mode) << ',' << r.readers << ',' << r.size
        << ',' << std::fixed << std::setprecision(6) << r.duration_s << ','
        << std::setprecision(0) << r.reads << ',' << r.writes << ',' << r.read_rmw << ','
        << r.write_rmw << ',' << std::setprecision(2) << r.throughput_ops_s << ','
        << r.violations;
    out << row.str() << '\n';
  }
}

void emit_csv(const std::string& path, std::span<const BenchResult> results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  emit_csv(out, results);
  if (!out) throw std::runtime_error("failed writing " + path);
}

MatrixSpec parse_matrix(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("matrix: expected a JSON object");

  MatrixSpec spec;
  try {
    for (const auto& a : doc.at("algos")) spec.algos.push_back(parse_register_kind(a.get<std::string>()));
    for (const auto& r : doc.at("readers")) spec.readers.push_back(r.get<std::uint32_t>());
    for (const auto& s : doc.at("sizes")) {
      spec.sizes.push_back(s.is_string() ? parse_size(s.get<std::string>()) : s.get<std::size_t>());
    }
    BenchConfig& base = spec.base;
    if (doc.contains("mode")) base.mode = parse_bench_mode(doc["mode"].get<std::string>());
    if (doc.contains("duration")) base.duration_s = doc["duration"].get<double>();
    if (doc.contains("repeat")) base.repeat = doc["repeat"].get<unsigned>();
    if (doc.contains("verify")) base.verify = doc["verify"].get<bool>();
    if (doc.contains("seed")) base.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("pin")) base.pin = doc["pin"].get<bool>();
    if (doc.contains("min_ops")) base.min_ops = doc["min_ops"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
  if (spec.algos.empty() || spec.readers.empty() || spec.sizes.empty()) {
    throw ConfigError("matrix: algos, readers and sizes must be non-empty");
  }
  return spec;
}

MatrixSpec load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read matrix file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

namespace {

bool hosts(RegisterKind algo, std::uint32_t readers) {
  return algo != RegisterKind::kRf || readers <= RfRegister::kMaxReaders;
}

}  // namespace

std::size_t matrix_row_count(const MatrixSpec& spec) {
  std::size_t rows = 0;
  for (RegisterKind algo : spec.algos) {
    for (std::uint32_t readers : spec.readers) {
      if (hosts(algo, readers)) rows += spec.sizes.size();
    }
  }
  return rows;
}

std::vector<BenchResult> run_matrix(const MatrixSpec& spec, std::ostream& notes) {
  std::vector<BenchResult> results;
  for (RegisterKind algo : spec.algos) {
    for (std::size_t size : spec.sizes) {
      for (std::uint32_t readers : spec.readers) {
        if (!hosts(algo, readers)) {
          notes << "skipped " << to_string(algo) << " readers=" << readers << " size=" << size
                << ": exceeds the 58-reader capacity\n";
          continue;
        }
        BenchConfig cfg = spec.base;
        cfg.algo = algo;
        cfg.readers = readers;
        cfg.size = size;
        results.push_back(run_bench(cfg));
      }
    }
  }
  return results;
}

}  // namespace arc
