#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "daeref/certificates.hpp"
#include "daeref/conversion.hpp"
#include "daeref/refinement.hpp"
#include "daeref/rng.hpp"

namespace daeref {

/// Row t of each block holds the sample at time t.
struct Trace {
  Mat x;
  Mat u;
  Mat s;
  Mat y;

  Index horizon() const { return x.rows(); }
};

/// Where a driving input comes from: a fixed signal, a gain on the driven
/// system's own state, or a seeded uniform draw in [−bound, bound] per entry.
struct InputSource {
  enum class Kind { Signal, Gain, Random };

  Kind kind = Kind::Gain;
  std::vector<Vec> signal;
  Mat gain;
  std::uint64_t seed = 0;
  double bound = 0.0;

  static InputSource from_signal(std::vector<Vec> samples);
  static InputSource from_gain(Mat g);
  static InputSource random(std::uint64_t seed, double bound);
};

/// Stateful sampler over an InputSource.
class InputStream {
 public:
  InputStream(const InputSource& source, Index dim);

  Vec next(Index t, const Vec& state);

 private:
  const InputSource& source_;
  Index dim_;
  Rng rng_;
};

Trace simulate_dv(const DvSystem& dv, const Vec& x0, const InputSource& source, Index horizon);

struct CoupledRun {
  Trace abstract_trace;
  Trace concrete_trace;
  std::vector<double> distance;
  double max_distance = 0.0;
};

/// Abstract DV driven by `abstract_source`; concrete DV driven through the
/// certificate's interface.
CoupledRun simulate_coupled(const DvSystem& abstract_dv, const DvSystem& concrete_dv,
                            const RefinementCertificate& cert,
                            const InputSource& abstract_source, const Vec& xa0,
                            const Vec& x0, Index horizon);

struct ClosedRun {
  Trace concrete_trace;  // u: DAE input, s: driving input of the refined controller
  Trace abstract_trace;  // x: co-state z, s: abstract input v, y: H·z
  std::vector<double> distance;
  double max_distance = 0.0;
};

/// Concrete DAE under a refined controller, stepped by per-step stacked
/// solves. The co-state input v defaults to the lifted gain (v = T·z).
ClosedRun simulate_dae_closed(const DaeSystem& concrete, const RefinedController& ctrl,
                              const Vec& x0, const Vec& z0, Index horizon,
                              const InputSource* co_state_source = nullptr);

struct DistanceProfile {
  std::vector<double> profile;
  double max = 0.0;
};

DistanceProfile output_distance(const Trace& a, const Trace& b);

/// CSV with header t,x1..,u1..,s1..,y1.., 17 significant digits, LF endings.
void export_trace(const Trace& trace, const std::string& path);
Trace import_trace(const std::string& path);

}  // namespace daeref
