#include "cip/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "cip/error.hpp"

namespace cip {

using nlohmann::json;

namespace {

Complex parse_amplitude(const json& a, const std::string& where) {
  if (a.is_number()) return {a.get<double>(), 0.0};
  if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
    return {a[0].get<double>(), a[1].get<double>()};
  }
  throw InputError(where + ": amplitude must be a number or [re, im]");
}

ComplexVector parse_vector(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    throw InputError(where + ": expected " + std::to_string(dim) + " amplitudes");
  }
  ComplexVector out(dim);
  for (int i = 0; i < dim; ++i) {
    out(i) = parse_amplitude(v[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

MeasurementBasis parse_basis(const json& b, int dim, const std::string& field,
                             const std::string& label, double tol_ortho) {
  if (b.is_string()) {
    if (b.get<std::string>() == "computational") return MeasurementBasis::computational(dim, label);
    throw InputError("field '" + field + "': unknown named basis '" + b.get<std::string>() + "'");
  }
  if (!b.is_array() || static_cast<int>(b.size()) != dim) {
    throw InputError("field '" + field + "': expected " + std::to_string(dim) + " vectors");
  }
  std::vector<ComplexVector> vs;
  for (int j = 0; j < dim; ++j) {
    vs.push_back(parse_vector(b[static_cast<std::size_t>(j)], dim,
                              "field '" + field + "' vector " + std::to_string(j)));
  }
  return MeasurementBasis::from_vectors(vs, label.empty() ? field : label, tol_ortho);
}

std::vector<double> parse_reals(const json& v, const std::string& field) {
  if (!v.is_array()) throw InputError("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InputError("field '" + field + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string label_at(const json& labels, const char* key, std::size_t index) {
  if (!labels.is_object() || !labels.contains(key)) return {};
  const json& l = labels[key];
  if (l.is_string()) return index == 0 ? l.get<std::string>() : std::string{};
  if (l.is_array() && index < l.size() && l[index].is_string()) return l[index].get<std::string>();
  return {};
}

}  // namespace

const ProbVector& Instance::require_p() const {
  if (!p) throw InputError("instance '" + name + "' has no field 'p'");
  return *p;
}

const MeasurementBasis& Instance::post(std::size_t index) const {
  if (index >= posts.size()) {
    throw InputError("post-measurement index " + std::to_string(index) + " out of range (" +
                     std::to_string(posts.size()) + " available)");
  }
  return posts[index];
}

std::optional<std::vector<double>> Instance::known_spectrum() const {
  if (spectrum) return spectrum;
  if (rho) return rho->spectrum();
  return std::nullopt;
}

Instance parse_instance(const json& j, double tol_ortho) {
  if (!j.is_object()) throw InputError("instance must be a JSON object");
  Instance inst;
  inst.name = j.value("name", std::string{});
  if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
    throw InputError("instance is missing the integer field 'dimension'");
  }
  inst.dimension = j["dimension"].get<int>();
  if (inst.dimension < 1 || inst.dimension > kMaxDimension) {
    throw InputError("field 'dimension' must lie in [1, " + std::to_string(kMaxDimension) + "]");
  }
  const int d = inst.dimension;
  const json labels = j.value("labels", json::object());

  if (!j.contains("M")) throw InputError("instance is missing the field 'M'");
  inst.m = parse_basis(j["M"], d, "M", label_at(labels, "M", 0), tol_ortho);

  if (j.contains("N") && j.contains("N_list")) {
    throw InputError("instance gives both 'N' and 'N_list'");
  }
  if (j.contains("N")) {
    inst.posts.push_back(parse_basis(j["N"], d, "N", label_at(labels, "N", 0), tol_ortho));
  } else if (j.contains("N_list")) {
    const json& list = j["N_list"];
    if (!list.is_array() || list.empty()) throw InputError("field 'N_list' must be a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = "N_list[" + std::to_string(i) + "]";
      std::string label = label_at(labels, "N", i);
      inst.posts.push_back(parse_basis(list[i], d, field, label, tol_ortho));
    }
  } else {
    throw InputError("instance is missing the field 'N' (or 'N_list')");
  }

  if (j.contains("p")) {
    auto p = parse_reals(j["p"], "p");
    if (static_cast<int>(p.size()) != d) {
      throw InputError("field 'p' has " + std::to_string(p.size()) + " entries, expected " +
                       std::to_string(d));
    }
    try {
      inst.p = ProbVector(std::move(p));
    } catch (const InputError& e) {
      throw InputError(std::string("field 'p': ") + e.what());
    }
  }
  if (j.contains("rho")) {
    const json& r = j["rho"];
    if (!r.is_array() || static_cast<int>(r.size()) != d) {
      throw InputError("field 'rho' must have " + std::to_string(d) + " rows");
    }
    ComplexMatrix m(d, d);
    for (int row = 0; row < d; ++row) {
      m.row(row) = parse_vector(r[static_cast<std::size_t>(row)], d,
                                "field 'rho' row " + std::to_string(row))
                       .transpose();
    }
    try {
      inst.rho = DensityMatrix(m);
    } catch (const InputError& e) {
      throw InputError(std::string("field 'rho': ") + e.what());
    }
  }
  if (j.contains("spectrum")) {
    auto s = parse_reals(j["spectrum"], "spectrum");
    if (static_cast<int>(s.size()) != d) throw InputError("field 'spectrum' has the wrong length");
    inst.spectrum = std::move(s);
  }
  return inst;
}

Instance load_instance(const std::filesystem::path& path, double tol_ortho) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("instance file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  Instance inst = parse_instance(j, tol_ortho);
  if (inst.name.empty()) inst.name = path.stem().string();
  return inst;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

json to_json_rounded(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(round12(x));
  return out;
}

json to_json_rounded(const ProbVector& v) { return to_json_rounded(v.entries()); }

json to_json(const SolverStats& s) {
  return {{"sdp_count", s.sdp_count},
          {"total_iterations", s.total_iterations},
          {"max_duality_gap", round12(s.max_gap)},
          {"max_primal_residual", round12(s.max_residual)}};
}

json to_json(const DensityMatrix& rho) {
  json rows = json::array();
  for (int i = 0; i < rho.dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < rho.dim(); ++k) {
      const Complex z = rho.matrix()(i, k);
      row.push_back(json::array({round12(z.real()), round12(z.imag())}));
    }
    rows.push_back(row);
  }
  return rows;
}

json to_json(const BoundSet& b) {
  json out = {{"p", to_json_rounded(b.p)},
              {"r", to_json_rounded(b.r)},
              {"s_raw", to_json_rounded(b.s_raw)},
              {"t", to_json_rounded(b.t)},
              {"flatten_applied", b.flatten_applied},
              {"solver", to_json(b.stats)}};
  if (!b.certificates.empty()) {
    json certs = json::array();
    for (const auto& c : b.certificates) {
      json subset = json::array();
      for (int i : c.subset) subset.push_back(i + 1);
      certs.push_back({{"side", c.side == Certificate::Side::upper ? "upper" : "lower"},
                       {"k", c.k},
                       {"subset", subset},
                       {"value", round12(c.value)},
                       {"state", to_json(c.state)}});
    }
    out["certificates"] = certs;
  }
  return out;
}

std::string serialize(const json& j) { return j.dump(2) + "\n"; }

}  // namespace cip
