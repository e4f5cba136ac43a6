#include "daeref/simulation.hpp"

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "daeref/error.hpp"

namespace daeref {

namespace {

Trace allocate(Index horizon, Index n, Index p, Index q, Index k) {
  return Trace{Mat(horizon, n), Mat(horizon, p), Mat(horizon, q), Mat(horizon, k)};
}

void record(Trace& tr, Index t, const Vec& x, const Vec& u, const Vec& s, const Vec& y) {
  tr.x.row(t) = x.transpose();
  if (tr.u.cols() > 0) tr.u.row(t) = u.transpose();
  tr.s.row(t) = s.transpose();
  tr.y.row(t) = y.transpose();
}

void append_header(std::string& line, char prefix, Index count) {
  for (Index i = 1; i <= count; ++i) {
    line += ',';
    line += prefix;
    line += std::to_string(i);
  }
}

void append_row(std::string& line, const Mat& block, Index t) {
  char buf[40];
  for (Index j = 0; j < block.cols(); ++j) {
    std::snprintf(buf, sizeof buf, ",%.17g", block(t, j));
    line += buf;
  }
}

}  // namespace

InputSource InputSource::from_signal(std::vector<Vec> samples) {
  InputSource src;
  src.kind = Kind::Signal;
  src.signal = std::move(samples);
  return src;
}

InputSource InputSource::from_gain(Mat g) {
  InputSource src;
  src.kind = Kind::Gain;
  src.gain = std::move(g);
  return src;
}

InputSource InputSource::random(std::uint64_t seed, double bound) {
  InputSource src;
  src.kind = Kind::Random;
  src.seed = seed;
  src.bound = bound;
  return src;
}

InputStream::InputStream(const InputSource& source, Index dim)
    : source_(source), dim_(dim), rng_(source.seed) {}

Vec InputStream::next(Index t, const Vec& state) {
  switch (source_.kind) {
    case InputSource::Kind::Signal: {
      if (t >= static_cast<Index>(source_.signal.size())) {
        throw Error(ErrorKind::InsufficientInputHorizon, "input signal is shorter than the horizon");
      }
      const Vec& v = source_.signal[static_cast<std::size_t>(t)];
      if (v.size() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "input sample has wrong dimension");
      }
      return v;
    }
    case InputSource::Kind::Gain:
      if (source_.gain.size() == 0) return Vec::Zero(dim_);
      if (source_.gain.rows() != dim_ || source_.gain.cols() != state.size()) {
        throw Error(ErrorKind::DimensionMismatch, "input gain has wrong dimension");
      }
      return source_.gain * state;
    case InputSource::Kind::Random:
      return rng_.uniform_vec(dim_, -source_.bound, source_.bound);
  }
  return Vec::Zero(dim_);
}

Trace simulate_dv(const DvSystem& dv, const Vec& x0, const InputSource& source, Index horizon) {
  dv.validate();
  if (x0.size() != dv.n()) {
    throw Error(ErrorKind::DimensionMismatch, "x0 must have n entries");
  }
  Trace tr = allocate(horizon, dv.n(), dv.p(), dv.p(), dv.k());
  InputStream stream(source, dv.p());
  Vec x = x0;
  for (Index t = 0; t < horizon; ++t) {
    const Vec s = stream.next(t, x);
    record(tr, t, x, dv.Cu * x + dv.Du * s, s, dv.C * x);
    x = dv.Ad * x + dv.Bd * s;
  }
  return tr;
}

CoupledRun simulate_coupled(const DvSystem& abstract_dv, const DvSystem& concrete_dv,
                            const RefinementCertificate& cert,
                            const InputSource& abstract_source, const Vec& xa0,
                            const Vec& x0, Index horizon) {
  abstract_dv.validate();
  concrete_dv.validate();
  if (xa0.size() != abstract_dv.n() || x0.size() != concrete_dv.n()) {
    throw Error(ErrorKind::DimensionMismatch, "initial states have wrong dimensions");
  }
  CoupledRun run;
  run.abstract_trace = allocate(horizon, abstract_dv.n(), abstract_dv.p(), abstract_dv.p(),
                                abstract_dv.k());
  run.concrete_trace = allocate(horizon, concrete_dv.n(), concrete_dv.p(), concrete_dv.p(),
                                concrete_dv.k());
  InputStream stream(abstract_source, abstract_dv.p());
  Vec xa = xa0;
  Vec x = x0;
  for (Index t = 0; t < horizon; ++t) {
    const Vec v = stream.next(t, xa);
    const Vec s = interface_apply(cert, v, xa, x);
    const Vec ya = abstract_dv.C * xa;
    const Vec y = concrete_dv.C * x;
    record(run.abstract_trace, t, xa, abstract_dv.Cu * xa + abstract_dv.Du * v, v, ya);
    record(run.concrete_trace, t, x, concrete_dv.Cu * x + concrete_dv.Du * s, s, y);
    run.distance.push_back((y - ya).norm());
    run.max_distance = std::max(run.max_distance, run.distance.back());
    xa = abstract_dv.Ad * xa + abstract_dv.Bd * v;
    x = concrete_dv.Ad * x + concrete_dv.Bd * s;
  }
  return run;
}

ClosedRun simulate_dae_closed(const DaeSystem& concrete, const RefinedController& ctrl,
                              const Vec& x0, const Vec& z0, Index horizon,
                              const InputSource* co_state_source) {
  concrete.validate();
  if (x0.size() != concrete.n() || z0.size() != ctrl.m()) {
    throw Error(ErrorKind::DimensionMismatch, "initial states have wrong dimensions");
  }
  const InputSource lifted = InputSource::from_gain(ctrl.feed.lifted_gain);
  InputStream stream(co_state_source ? *co_state_source : lifted, ctrl.q());

  ClosedRun run;
  run.concrete_trace = allocate(horizon, concrete.n(), concrete.p(), ctrl.p(), concrete.k());
  run.abstract_trace = allocate(horizon, ctrl.m(), 0, ctrl.q(), ctrl.H.rows());
  Vec x = x0;
  Vec z = z0;
  for (Index t = 0; t < horizon; ++t) {
    const Vec v = stream.next(t, z);
    const Vec s = ctrl.driving(x, z, v);
    const StepResult step = refined_step(concrete, ctrl, x, s);
    const Vec y = concrete.C * x;
    const Vec ya = ctrl.H * z;
    record(run.concrete_trace, t, x, step.u, s, y);
    record(run.abstract_trace, t, z, Vec(), v, ya);
    run.distance.push_back((y - ya).norm());
    run.max_distance = std::max(run.max_distance, run.distance.back());
    x = step.x_next;
    z = ctrl.F * z + ctrl.G * v;
  }
  return run;
}

DistanceProfile output_distance(const Trace& a, const Trace& b) {
  if (a.horizon() != b.horizon() || a.y.cols() != b.y.cols()) {
    throw Error(ErrorKind::HorizonMismatch, "traces differ in horizon or output dimension");
  }
  DistanceProfile out;
  for (Index t = 0; t < a.horizon(); ++t) {
    out.profile.push_back((a.y.row(t) - b.y.row(t)).norm());
    out.max = std::max(out.max, out.profile.back());
  }
  return out;
}

void export_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  std::string line = "t";
  append_header(line, 'x', trace.x.cols());
  append_header(line, 'u', trace.u.cols());
  append_header(line, 's', trace.s.cols());
  append_header(line, 'y', trace.y.cols());
  out << line << '\n';
  for (Index t = 0; t < trace.horizon(); ++t) {
    line = std::to_string(t);
    append_row(line, trace.x, t);
    append_row(line, trace.u, t);
    append_row(line, trace.s, t);
    append_row(line, trace.y, t);
    out << line << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path);
}

Trace import_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::IoFailure, path + " is empty");

  std::vector<char> groups;
  std::stringstream hs(header);
  std::string cell;
  std::getline(hs, cell, ',');
  if (cell != "t") throw Error(ErrorKind::IoFailure, "trace header must start with t");
  while (std::getline(hs, cell, ',')) {
    if (cell.empty() || std::string("xusy").find(cell[0]) == std::string::npos) {
      throw Error(ErrorKind::IoFailure, "unknown trace column " + cell);
    }
    groups.push_back(cell[0]);
  }

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::getline(ls, cell, ',');
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != groups.size()) {
      throw Error(ErrorKind::IoFailure, "trace row has wrong number of fields");
    }
    rows.push_back(std::move(row));
  }

  const auto count = [&](char g) {
    return static_cast<Index>(std::count(groups.begin(), groups.end(), g));
  };
  const Index horizon = static_cast<Index>(rows.size());
  Trace tr = allocate(horizon, count('x'), count('u'), count('s'), count('y'));
  for (Index t = 0; t < horizon; ++t) {
    Index ix = 0, iu = 0, is = 0, iy = 0;
    for (std::size_t j = 0; j < groups.size(); ++j) {
      const double v = rows[static_cast<std::size_t>(t)][j];
      switch (groups[j]) {
        case 'x': tr.x(t, ix++) = v; break;
        case 'u': tr.u(t, iu++) = v; break;
        case 's': tr.s(t, is++) = v; break;
        default: tr.y(t, iy++) = v; break;
      }
    }
  }
  return tr;
}

}  // namespace daeref
