#include "arc/verify.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "arc/errors.hpp"

namespace arc {
namespace {

constexpr std::size_t kInitial = std::numeric_limits<std::size_t>::max();

// Writes indexed by seq, plus a view ordered by completion time with the
// running maximum seq, so "latest write completed before t" is a binary search.
class WriteIndex {
 public:
  explicit WriteIndex(const History& h) : h_(h) {
    for (std::size_t i = 0; i < h.ops.size(); ++i) {
      if (h.ops[i].kind == OpKind::kWrite) by_seq_.push_back(i);
    }
    std::sort(by_seq_.begin(), by_seq_.end(),
              [&](std::size_t a, std::size_t b) { return h.ops[a].seq < h.ops[b].seq; });
    for (std::size_t i = 0; i < by_seq_.size(); ++i) {
      const std::uint64_t seq = h.ops[by_seq_[i]].seq;
      if (seq == h.initial_seq || (i > 0 && seq == h.ops[by_seq_[i - 1]].seq)) {
        throw CorruptedHistoryError("duplicate write seq " + std::to_string(seq));
      }
    }

    by_response_ = by_seq_;
    std::sort(by_response_.begin(), by_response_.end(), [&](std::size_t a, std::size_t b) {
      return h.ops[a].response_ts < h.ops[b].response_ts;
    });
    responses_.reserve(by_response_.size());
    running_max_.reserve(by_response_.size());
    std::size_t best = kInitial;
    for (std::size_t idx : by_response_) {
      if (best == kInitial || h.ops[idx].seq > h.ops[best].seq) best = idx;
      responses_.push_back(h.ops[idx].response_ts);
      running_max_.push_back(best);
    }
  }

  /// Index of the write that produced seq, kInitial for the initial value.
  std::size_t writer_of(std::uint64_t seq) const {
    if (seq == h_.initial_seq) return kInitial;
    auto it = std::lower_bound(by_seq_.begin(), by_seq_.end(), seq,
                               [&](std::size_t i, std::uint64_t s) { return h_.ops[i].seq < s; });
    if (it == by_seq_.end() || h_.ops[*it].seq != seq) {
      throw CorruptedHistoryError("read returned seq " + std::to_string(seq) +
                                  " which no write produced");
    }
    return *it;
  }

  /// Write with the largest seq among those completed strictly before t.
  std::size_t latest_completed_before(std::int64_t t) const {
    const auto n = static_cast<std::size_t>(
        std::lower_bound(responses_.begin(), responses_.end(), t) - responses_.begin());
    return n == 0 ? kInitial : running_max_[n - 1];
  }

 private:
  const History& h_;
  std::vector<std::size_t> by_seq_;
  std::vector<std::size_t> by_response_;
  std::vector<std::int64_t> responses_;
  std::vector<std::size_t> running_max_;
};

bool is_checked_read(const OpRecord& op) { return op.kind == OpKind::kRead && op.intact; }

}  // namespace

std::vector<Violation> check_no_past(const History& history) {
  const WriteIndex writes(history);
  std::vector<Violation> out;
  for (std::size_t i = 0; i < history.ops.size(); ++i) {
    const OpRecord& r = history.ops[i];
    if (!is_checked_read(r)) continue;

    const std::size_t source = writes.writer_of(r.seq);
    if (source != kInitial && r.response_ts < history.ops[source].invocation_ts) {
      out.push_back({ViolationKind::kFutureRead, i, source});
      continue;
    }
    const std::size_t latest = writes.latest_completed_before(r.invocation_ts);
    const std::uint64_t latest_seq =
        latest == kInitial ? history.initial_seq : history.ops[latest].seq;
    if (latest != kInitial && latest_seq > r.seq) {
      out.push_back({ViolationKind::kNoPast, i, latest});
    }
  }
  return out;
}

std::vector<Violation> check_no_new_old_inversion(const History& history) {
  const WriteIndex writes(history);
  std::vector<std::size_t> reads;
  for (std::size_t i = 0; i < history.ops.size(); ++i) {
    if (is_checked_read(history.ops[i])) {
      writes.writer_of(history.ops[i].seq);
      reads.push_back(i);
    }
  }

  std::vector<std::size_t> by_invocation = reads;
  std::sort(by_invocation.begin(), by_invocation.end(), [&](std::size_t a, std::size_t b) {
    return history.ops[a].invocation_ts < history.ops[b].invocation_ts;
  });
  std::vector<std::size_t> by_response = std::move(reads);
  std::sort(by_response.begin(), by_response.end(), [&](std::size_t a, std::size_t b) {
    return history.ops[a].response_ts < history.ops[b].response_ts;
  });

  std::vector<Violation> out;
  std::size_t done = 0;  // prefix of by_response completed before the current r2
  std::size_t newest = kInitial;
  for (std::size_t r2 : by_invocation) {
    const std::int64_t start = history.ops[r2].invocation_ts;
    while (done < by_response.size() && history.ops[by_response[done]].response_ts < start) {
      const std::size_t r1 = by_response[done++];
      if (newest == kInitial || history.ops[r1].seq > history.ops[newest].seq) newest = r1;
    }
    if (newest != kInitial && history.ops[newest].seq > history.ops[r2].seq) {
      out.push_back({ViolationKind::kNewOldInversion, r2, newest});
    }
  }
  return out;
}

std::size_t check_integrity(const History& history) noexcept {
  return static_cast<std::size_t>(std::count_if(
      history.ops.begin(), history.ops.end(),
      [](const OpRecord& op) { return op.kind == OpKind::kRead && !op.intact; }));
}

VerificationReport verify_history(const History& history) {
  VerificationReport report;
  report.torn = check_integrity(history);
  try {
    report.no_past = check_no_past(history).size();
    report.inversions = check_no_new_old_inversion(history).size();
  } catch (const CorruptedHistoryError&) {
    report.corrupted = true;
  }
  return report;
}

void write_history(std::ostream& out, const History& history) {
  out << "# readers=" << history.readers << " kind=" << to_string(history.kind) << '\n';
  for (const OpRecord& op : history.ops) {
    out << op.thread << ' ' << (op.kind == OpKind::kRead ? "read" : "write") << ' '
        << op.invocation_ts << ' ' << op.response_ts << ' ' << op.seq << ' '
        << (op.intact ? 1 : 0) << '\n';
  }
}

History read_history(std::istream& in) {
  History history;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string field;
      while (meta >> field) {
        if (field.rfind("readers=", 0) == 0) {
          history.readers = static_cast<std::uint32_t>(std::stoul(field.substr(8)));
        } else if (field.rfind("kind=", 0) == 0) {
          history.kind = parse_register_kind(field.substr(5));
        }
      }
      continue;
    }
    std::istringstream fields(line);
    OpRecord op;
    std::string kind;
    int intact = 1;
    if (!(fields >> op.thread >> kind >> op.invocation_ts >> op.response_ts >> op.seq >> intact) ||
        (kind != "read" && kind != "write") || (intact != 0 && intact != 1) ||
        op.invocation_ts > op.response_ts) {
      throw ConfigError("malformed history line " + std::to_string(line_no) + ": " + line);
    }
    op.kind = kind == "read" ? OpKind::kRead : OpKind::kWrite;
    op.intact = intact == 1;
    history.ops.push_back(op);
  }
  return history;
}

}  // namespace arc
