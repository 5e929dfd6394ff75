#include "pbmac/metrics.hpp"

#include <stdexcept>

namespace pbmac {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void ProbeHistogram::record(int count) {
  if (count < 1) throw std::invalid_argument("probe slot count must be >= 1");
  if (count == 1) {
    ++one;
  } else if (count == 2) {
    ++two;
  } else {
    ++three_plus;
  }
}

double ProbeHistogram::fraction_one() const { return ratio(one, total()); }
double ProbeHistogram::fraction_two() const { return ratio(two, total()); }
double ProbeHistogram::fraction_three_plus() const { return ratio(three_plus, total()); }

Summary finalize(const MetricsRecord& r) {
  Summary s;
  s.no_frames = r.frames_generated == 0;
  s.no_calls = r.calls_started == 0;
  s.frame_loss_rate = ratio(r.frames_lost, r.frames_generated);
  s.call_drop_rate = ratio(r.calls_dropped, r.calls_started);
  s.call_block_rate = ratio(r.calls_blocked, r.calls_started);
  s.p1 = r.probes.fraction_one();
  s.p2 = r.probes.fraction_two();
  s.p3plus = r.probes.fraction_three_plus();
  return s;
}

bool accounting_holds(const MetricsRecord& r) {
  return r.frames_generated == r.frames_delivered + r.frames_lost &&
         r.calls_started ==
             r.calls_completed + r.calls_dropped + r.calls_blocked + r.calls_in_progress;
}

}  // namespace pbmac
