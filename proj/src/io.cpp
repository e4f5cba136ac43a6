#include "daeref/io.hpp"

#include <cmath>
#include <fstream>

#include "daeref/error.hpp"

namespace daeref {

namespace {

[[noreturn]] void bad_file(const std::string& msg) {
  throw Error(ErrorKind::InvalidSystemFile, msg);
}

Json make_document(const std::string& kind) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = kind;
  doc["matrices"] = Json::object();
  doc["shapes"] = Json::object();
  return doc;
}

void put(Json& doc, const std::string& name, const Mat& m) {
  doc["matrices"][name] = matrix_to_json(m);
  doc["shapes"][name] = {m.rows(), m.cols()};
}

Mat get(const Json& doc, const std::string& name) {
  if (!doc.contains("matrices") || !doc["matrices"].is_object() ||
      !doc["matrices"].contains(name)) {
    bad_file("missing matrix " + name);
  }
  Mat m = matrix_from_json(doc["matrices"][name], name);
  if (doc.contains("shapes") && doc["shapes"].contains(name)) {
    const Json& shape = doc["shapes"][name];
    if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_integer() ||
        !shape[1].is_number_integer()) {
      bad_file("shape of " + name + " must be [rows, cols]");
    }
    const Index rows = shape[0].get<Index>();
    const Index cols = shape[1].get<Index>();
    if (m.size() == 0 && rows * cols == 0) {
      m.resize(rows, cols);
    } else if (m.rows() != rows || m.cols() != cols) {
      bad_file("shape of " + name + " disagrees with its entries");
    }
  }
  return m;
}

bool has_matrix(const Json& doc, const std::string& name) {
  return doc.contains("matrices") && doc["matrices"].contains(name);
}

Json initial_to_json(const InitialStates& init) {
  if (init.is_free()) return "free";
  Json pts = Json::array();
  for (const Vec& p : init.points) pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  return pts;
}

InitialStates initial_from_json(const Json& doc) {
  if (!doc.contains("initial_states")) return InitialStates::free();
  const Json& j = doc["initial_states"];
  if (j.is_string()) {
    if (j.get<std::string>() != "free") bad_file("initial_states must be \"free\" or a list");
    return InitialStates::free();
  }
  if (!j.is_array()) bad_file("initial_states must be \"free\" or a list");
  std::vector<Vec> pts;
  for (const Json& p : j) {
    if (!p.is_array()) bad_file("initial state must be an array of numbers");
    Vec v(static_cast<Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p[i].is_number()) bad_file("initial state entries must be numbers");
      v(static_cast<Index>(i)) = p[i].get<double>();
    }
    pts.push_back(std::move(v));
  }
  return InitialStates::listed(std::move(pts));
}

void expect_kind(const Json& doc, const std::string& kind) {
  const std::string got = document_kind(doc);
  if (got != kind) bad_file("expected kind \"" + kind + "\", got \"" + got + "\"");
}

double get_number(const Json& doc, const std::string& name) {
  if (!doc.contains(name) || !doc[name].is_number()) bad_file("missing number " + name);
  const double v = doc[name].get<double>();
  if (!std::isfinite(v)) bad_file(name + " must be finite");
  return v;
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) bad_file(name + " must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = 0;
  if (rows > 0) {
    if (!j[0].is_array()) bad_file(name + " must be an array of rows");
    cols = static_cast<Index>(j[0].size());
  }
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      bad_file(name + " has ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) bad_file(name + " entries must be numbers");
      m(i, c) = v.get<double>();
    }
  }
  if (!m.allFinite()) bad_file(name + " has non-finite entries");
  return m;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    bad_file(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path);
}

std::string document_kind(const Json& doc) {
  if (!doc.is_object()) bad_file("document must be a JSON object");
  if (!doc.contains("schema") || !doc["schema"].is_number_integer() ||
      doc["schema"].get<int>() != kSchemaVersion) {
    bad_file("unsupported or missing schema version");
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) bad_file("missing kind");
  return doc["kind"].get<std::string>();
}

Json dae_to_json(const DaeSystem& sys, const DrivingRecovery* recovery) {
  Json doc = make_document("dae");
  put(doc, "E", sys.E);
  put(doc, "A", sys.A);
  put(doc, "B", sys.B);
  put(doc, "C", sys.C);
  if (recovery) put(doc, "W", recovery->W);
  doc["initial_states"] = initial_to_json(sys.initial);
  return doc;
}

LoadedDae dae_from_json(const Json& doc) {
  expect_kind(doc, "dae");
  LoadedDae out;
  out.sys = DaeSystem{get(doc, "E"), get(doc, "A"), get(doc, "B"), get(doc, "C"),
                      initial_from_json(doc)};
  try {
    out.sys.validate();
  } catch (const Error& e) {
    bad_file(e.what());
  }
  if (has_matrix(doc, "W")) {
    DrivingRecovery rec{get(doc, "W"), out.sys.n()};
    if (rec.W.rows() != out.sys.p() || rec.W.cols() != 2 * out.sys.n() + out.sys.p()) {
      bad_file("W must be p×(2n+p)");
    }
    out.recovery = std::move(rec);
  }
  return out;
}

Json dv_to_json(const DvSystem& dv) {
  Json doc = make_document("dv");
  put(doc, "Ad", dv.Ad);
  put(doc, "Bd", dv.Bd);
  put(doc, "Cu", dv.Cu);
  put(doc, "Du", dv.Du);
  put(doc, "C", dv.C);
  doc["initial_states"] = initial_to_json(dv.initial);
  return doc;
}

DvSystem dv_from_json(const Json& doc) {
  expect_kind(doc, "dv");
  DvSystem dv{get(doc, "Ad"), get(doc, "Bd"), get(doc, "Cu"), get(doc, "Du"), get(doc, "C"),
              initial_from_json(doc)};
  try {
    dv.validate();
  } catch (const Error& e) {
    bad_file(e.what());
  }
  return dv;
}

Json controller_to_json(const DaeController& ctrl) {
  Json doc = make_document("controller");
  doc["form"] = "dae";
  put(doc, "Ec", ctrl.Ec);
  put(doc, "Ac", ctrl.Ac);
  put(doc, "Bc", ctrl.Bc);
  return doc;
}

Json refined_to_json(const RefinedController& ctrl) {
  Json doc = make_document("controller");
  doc["form"] = "refined";
  put(doc, "E_ctrl", ctrl.E_ctrl);
  put(doc, "A_ctrl", ctrl.A_ctrl);
  put(doc, "S_ctrl", ctrl.S_ctrl);
  put(doc, "Cu", ctrl.Cu);
  put(doc, "Du", ctrl.Du);
  put(doc, "F", ctrl.F);
  put(doc, "G", ctrl.G);
  put(doc, "H", ctrl.H);
  put(doc, "P", ctrl.P);
  put(doc, "state_gain", ctrl.feed.state_gain);
  put(doc, "co_state_gain", ctrl.feed.co_state_gain);
  put(doc, "input_gain", ctrl.feed.input_gain);
  put(doc, "lifted_gain", ctrl.feed.lifted_gain);
  doc["feed"] = "s = state_gain*x + co_state_gain*z + input_gain*v, v = lifted_gain*z";
  return doc;
}

std::string controller_form(const Json& doc) {
  expect_kind(doc, "controller");
  if (!doc.contains("form") || !doc["form"].is_string()) return "dae";
  return doc["form"].get<std::string>();
}

DaeController controller_from_json(const Json& doc) {
  if (controller_form(doc) != "dae") bad_file("expected a DAE-form controller");
  DaeController ctrl{get(doc, "Ec"), get(doc, "Ac"), get(doc, "Bc")};
  if (ctrl.Ac.rows() != ctrl.Ec.rows() || ctrl.Bc.rows() != ctrl.Ec.rows() ||
      ctrl.Ac.cols() != ctrl.Ec.cols()) {
    bad_file("controller matrices have inconsistent dimensions");
  }
  return ctrl;
}

RefinedController refined_from_json(const Json& doc) {
  if (controller_form(doc) != "refined") bad_file("expected a refined controller");
  RefinedController ctrl;
  ctrl.E_ctrl = get(doc, "E_ctrl");
  ctrl.A_ctrl = get(doc, "A_ctrl");
  ctrl.S_ctrl = get(doc, "S_ctrl");
  ctrl.Cu = get(doc, "Cu");
  ctrl.Du = get(doc, "Du");
  ctrl.F = get(doc, "F");
  ctrl.G = get(doc, "G");
  ctrl.H = get(doc, "H");
  ctrl.P = get(doc, "P");
  ctrl.feed = DrivingFeed{get(doc, "state_gain"), get(doc, "co_state_gain"),
                          get(doc, "input_gain"), get(doc, "lifted_gain")};
  const Index n = ctrl.n(), p = ctrl.p(), m = ctrl.m(), q = ctrl.q();
  if (ctrl.A_ctrl.rows() != p || ctrl.A_ctrl.cols() != n || ctrl.S_ctrl.rows() != p ||
      ctrl.S_ctrl.cols() != p || ctrl.Cu.rows() != p || ctrl.Cu.cols() != n ||
      ctrl.Du.rows() != p || ctrl.Du.cols() != p || ctrl.F.cols() != m ||
      ctrl.G.rows() != m || ctrl.H.cols() != m || ctrl.P.rows() != n || ctrl.P.cols() != m ||
      ctrl.feed.state_gain.rows() != p || ctrl.feed.state_gain.cols() != n ||
      ctrl.feed.co_state_gain.rows() != p || ctrl.feed.co_state_gain.cols() != m ||
      ctrl.feed.input_gain.rows() != p || ctrl.feed.input_gain.cols() != q ||
      ctrl.feed.lifted_gain.rows() != q || ctrl.feed.lifted_gain.cols() != m) {
    bad_file("refined controller matrices have inconsistent dimensions");
  }
  return ctrl;
}

Json certificate_to_json(const RefinementCertificate& cert) {
  Json doc = make_document("certificate");
  put(doc, "P", cert.P);
  put(doc, "Q", cert.Q);
  put(doc, "R", cert.R);
  put(doc, "M", cert.stability.M);
  put(doc, "K", cert.stability.K);
  doc["lambda"] = cert.stability.lambda;
  doc["gamma_coeff"] = cert.gamma_coeff;
  doc["v_max"] = cert.v_max;
  doc["epsilon"] = cert.epsilon;
  return doc;
}

RefinementCertificate certificate_from_json(const Json& doc) {
  expect_kind(doc, "certificate");
  RefinementCertificate cert;
  cert.P = get(doc, "P");
  cert.Q = get(doc, "Q");
  cert.R = get(doc, "R");
  cert.stability.M = get(doc, "M");
  cert.stability.K = get(doc, "K");
  cert.stability.lambda = get_number(doc, "lambda");
  cert.gamma_coeff = get_number(doc, "gamma_coeff");
  cert.v_max = get_number(doc, "v_max");
  cert.epsilon = get_number(doc, "epsilon");
  const Index n = cert.P.rows();
  if (cert.stability.M.rows() != n || cert.stability.M.cols() != n ||
      cert.stability.K.cols() != n || cert.Q.rows() != cert.stability.K.rows() ||
      cert.Q.cols() != cert.P.cols() || cert.R.rows() != cert.Q.rows() ||
      !(cert.stability.lambda > 0.0 && cert.stability.lambda < 1.0) ||
      cert.gamma_coeff < 0.0 || cert.v_max < 0.0 || cert.epsilon < 0.0) {
    bad_file("certificate fields are inconsistent");
  }
  return cert;
}

}  // namespace daeref
