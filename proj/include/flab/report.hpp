#pragma once

// JSON encodings for exact values, f-tables, verdicts and kernels, plus
// a plain-text table rendered from the JSON alone.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "flab/algebraic_shift.hpp"
#include "flab/entropy_value.hpp"
#include "flab/f_invariant.hpp"

namespace flab {

using Json = nlohmann::ordered_json;

/// {"terms": {"2": "3/2"}, "float": 1.0397}; exact fields carry no floats.
inline Json to_json(const EntropyValue& v) {
  Json terms = Json::object();
  for (const auto& [p, q] : v.terms()) terms[std::to_string(p)] = rational_to_string(q);
  return Json{{"terms", terms}, {"float", v.to_double()}, {"text", v.to_string()}};
}

inline EntropyValue entropy_from_json(const Json& j) {
  EntropyValue::Terms t;
  for (const auto& [p, q] : j.at("terms").items()) t[std::stoull(p)] = parse_rational(q.get<std::string>());
  return EntropyValue::from_terms(t);
}

inline Json to_json(const RateResult& r) {
  Json inc = Json::array();
  for (const auto& v : r.increments) inc.push_back(to_json(v));
  return Json{{"generator", r.generator},
              {"value", to_json(r.value)},
              {"certificate", to_string(r.certificate)},
              {"increments", inc},
              {"nonincreasing", r.nonincreasing},
              {"evidence", r.evidence}};
}

inline Json to_json(const FReport& rep) {
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json rates = Json::array();
    for (const auto& r : row.rates) rates.push_back(to_json(r));
    Json j{{"n", row.n},
           {"window_entropy", to_json(row.window_entropy)},
           {"F", to_json(row.F)},
           {"F_certificate", to_string(row.F_cert)},
           {"F_star", to_json(row.F_star)},
           {"F_star_certificate", to_string(row.F_star_cert)}};
    j["running_f"] = row.running_f ? to_json(*row.running_f) : Json(nullptr);
    j["running_f_star"] = row.running_f_star ? to_json(*row.running_f_star) : Json(nullptr);
    j["rates"] = rates;
    rows.push_back(std::move(j));
  }
  Json out{{"process", rep.process}, {"rank", rep.rank}, {"relative", rep.relative}, {"rows", rows}};
  out["f"] = Json{{"value", to_json(rep.f)}, {"certificate", to_string(rep.f_cert)}, {"evidence", rep.f_evidence}};
  out["f_star"] =
      Json{{"value", to_json(rep.f_star)}, {"certificate", to_string(rep.f_star_cert)}, {"evidence", rep.f_star_evidence}};
  out["stabilized_at"] = rep.stabilized_at ? Json(*rep.stabilized_at) : Json(nullptr);
  return out;
}

inline Json to_json(const AdditionVerdict& v) {
  return Json{{"verdict", to_string(v.verdict)},
              {"total", {{"value", to_json(v.total)}, {"certificate", to_string(v.total_cert)}}},
              {"part_a", {{"value", to_json(v.part_a)}, {"certificate", to_string(v.a_cert)}}},
              {"part_b", {{"value", to_json(v.part_b)}, {"certificate", to_string(v.b_cert)}}},
              {"explanation", v.explanation}};
}

inline Json to_json(const Marginal& m) {
  Json j{{"window", m.target.to_string()},
         {"certificate", to_string(m.certificate)},
         {"enclosing_size", m.enclosing_size},
         {"lower", m.lower},
         {"upper", m.upper}};
  j["dimension"] = m.certified() ? Json(m.dimension()) : Json(nullptr);
  return j;
}

/// {"p": 2, "rank": 2, "d_in": 1, "d_out": 1, "coeffs": {"e": [[1]], "A": [[1]]}}
inline ConvolutionKernel kernel_from_json(const Json& j) {
  const auto p = j.at("p").get<std::uint32_t>();
  const int r = j.value("rank", 2);
  const auto d_in = j.value("d_in", std::size_t{1});
  const auto d_out = j.value("d_out", std::size_t{1});
  ConvolutionKernel::Coeffs c;
  for (const auto& [w, m] : j.at("coeffs").items()) c[FreeWord::parse(r, w)] = m.get<std::vector<std::vector<long long>>>();
  return ConvolutionKernel(p, r, d_in, d_out, c);
}

inline Json kernel_to_json(const ConvolutionKernel& k) {
  Json coeffs = Json::object();
  for (const auto& [u, m] : k.coeffs()) {
    Json rows = Json::array();
    for (std::size_t a = 0; a < k.d_out(); ++a) {
      Json row = Json::array();
      for (std::size_t b = 0; b < k.d_in(); ++b) row.push_back(m.at(a, b));
      rows.push_back(row);
    }
    coeffs[u.to_string()] = rows;
  }
  return Json{{"p", k.modulus()}, {"rank", k.rank()}, {"d_in", k.d_in()}, {"d_out", k.d_out()}, {"coeffs", coeffs}};
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return Json::parse(in);
}

namespace detail {

inline std::string value_text(const Json& v) {
  return v.is_null() ? "-" : v.at("text").get<std::string>();
}

inline void render_freport(std::ostringstream& out, const Json& rep, const std::string& indent) {
  out << "\n" << indent << rep.at("process").get<std::string>() << (rep.at("relative").get<bool>() ? " (relative)" : "") << "\n";
  out << indent << "  n | H(B(n)) | F | F* | running f | running f*\n";
  for (const auto& row : rep.at("rows")) {
    out << indent << "  " << row.at("n").get<std::size_t>() << " | " << value_text(row.at("window_entropy")) << " | "
        << value_text(row.at("F")) << " [" << row.at("F_certificate").get<std::string>() << "] | "
        << value_text(row.at("F_star")) << " [" << row.at("F_star_certificate").get<std::string>() << "] | "
        << value_text(row.at("running_f")) << " | " << value_text(row.at("running_f_star")) << "\n";
  }
  out << indent << "  f = " << value_text(rep.at("f").at("value")) << " ["
      << rep.at("f").at("certificate").get<std::string>() << "], f* = " << value_text(rep.at("f_star").at("value"))
      << " [" << rep.at("f_star").at("certificate").get<std::string>() << "]\n";
}

inline void render_node(std::ostringstream& out, const Json& j, const std::string& indent) {
  if (j.is_object() && j.contains("rows") && j.contains("process")) {
    render_freport(out, j, indent);
    return;
  }
  if (j.is_object() && j.contains("terms") && j.contains("text")) {
    out << j.at("text").get<std::string>() << "\n";
    return;
  }
  if (j.is_object()) {
    out << "\n";
    for (const auto& [k, v] : j.items()) {
      out << indent << k << ": ";
      if (v.is_primitive()) {
        out << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      } else {
        render_node(out, v, indent + "  ");
      }
    }
    return;
  }
  if (j.is_array()) {
    if (j.empty()) {
      out << "[]\n";
      return;
    }
    out << "\n";
    for (const auto& v : j) {
      out << indent << "- ";
      if (v.is_primitive()) {
        out << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      } else {
        render_node(out, v, indent + "  ");
      }
    }
    return;
  }
  out << j.dump() << "\n";
}

}  // namespace detail

/// Text view of a report; reads nothing but the JSON.
inline std::string render_text(const Json& report) {
  std::ostringstream out;
  for (const auto& [k, v] : report.items()) {
    out << k << ": ";
    if (v.is_primitive()) {
      out << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    } else {
      detail::render_node(out, v, "  ");
    }
  }
  return out.str();
}

}  // namespace flab
