#include "nematorus/io/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "nematorus/errors.hpp"

namespace nematorus::io {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_number(std::string_view text) {
  double out = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, out);
  if (text.empty() || ec != std::errc() || p != last || !std::isfinite(out))
    throw ConfigError("not a finite number: '" + std::string(text) + "'");
  return out;
}

CsvDocument::CsvDocument(std::string_view comment, std::initializer_list<std::string_view> columns) {
  this->comment(comment);
  bool first = true;
  for (auto c : columns) {
    if (!first) text_.push_back(',');
    text_.append(c);
    first = false;
  }
  text_.push_back('\n');
}

void CsvDocument::separator() {
  if (row_open_) text_.push_back(',');
  row_open_ = true;
}

CsvDocument& CsvDocument::cell(double v) {
  separator();
  text_ += format_number(v);
  return *this;
}

CsvDocument& CsvDocument::cell(long long v) {
  separator();
  text_ += std::to_string(v);
  return *this;
}

CsvDocument& CsvDocument::cell(std::string_view v) {
  separator();
  text_.append(v);
  return *this;
}

void CsvDocument::end_row() {
  text_.push_back('\n');
  row_open_ = false;
}

void CsvDocument::comment(std::string_view text) {
  text_.append("# ").append(text).push_back('\n');
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string field_csv(const AngleField<double>& field, const TorusGeometry<double>& geom,
                      const ElasticConstants<double>& k, std::string_view comment) {
  const auto density = energy_density(field, geom, k);
  CsvDocument doc(comment, {"theta", "phi", "alpha", "u", "nx", "ny", "nz", "energy_density"});
  const Grid& g = field.grid();
  for (int i = 0; i < g.n_theta; ++i) {
    for (int j = 0; j < g.n_phi; ++j) {
      const SurfacePoint<double> p(field.theta(i), field.phi(j));
      const auto pg = point_geometry(geom, p);
      const double a = field.alpha(i, j);
      const Vector3<double> n = std::cos(a) * pg.e_theta + std::sin(a) * pg.e_phi;
      doc.cell(field.theta(i)).cell(field.phi(j)).cell(a).cell(field.deviation()(i, j));
      doc.cell(n.x()).cell(n.y()).cell(n.z()).cell(density(i, j));
      doc.end_row();
    }
  }
  return doc.text();
}

std::string history_csv(const FlowReport<double>& rep, std::string_view comment) {
  CsvDocument doc(comment, {"step", "t", "energy", "max_rhs", "dissipation"});
  for (const auto& s : rep.energy_history) {
    doc.cell(static_cast<long long>(s.step)).cell(s.t).cell(s.energy).cell(s.max_rhs).cell(s.dissipation);
    doc.end_row();
  }
  std::string summary = "summary converged=" + std::string(rep.converged ? "true" : "false") +
                        " slow_manifold=" + (rep.slow_manifold ? "true" : "false") +
                        " steps=" + std::to_string(rep.steps) + " dt=" + format_number(rep.dt) +
                        " restarts=" + std::to_string(rep.restarts) +
                        " initial_energy=" + format_number(rep.initial_energy) +
                        " final_energy=" + format_number(rep.final_energy) +
                        " dissipation_integral=" + format_number(rep.dissipation_integral) +
                        " balance_defect=" + format_number(rep.balance_defect) +
                        " balance_tolerance=" + format_number(rep.balance_tolerance) +
                        " final_residual=" + format_number(rep.final_residual) +
                        " max_energy_increase=" + format_number(rep.max_energy_increase) +
                        " final_winding=" + std::to_string(rep.final_winding.h_theta) + "," +
                        std::to_string(rep.final_winding.h_phi) + " measured_winding=" +
                        (rep.measured_winding ? std::to_string(rep.measured_winding->h_theta) + "," +
                                                    std::to_string(rep.measured_winding->h_phi)
                                              : std::string("ambiguous")) +
                        " axisymmetric=" + (rep.axisymmetric ? "true" : "false") +
                        " rng_seed=" + std::to_string(rep.rng_seed);
  doc.comment(summary);
  return doc.text();
}

std::string breakdown_csv(const EnergyBreakdown<double>& e, std::string_view comment) {
  CsvDocument doc(comment,
                  {"total", "splay", "twist", "bend_intrinsic", "bend_extrinsic", "dirichlet", "potential", "offset"});
  doc.cell(e.total).cell(e.splay).cell(e.twist).cell(e.bend_intrinsic).cell(e.bend_extrinsic);
  doc.cell(e.dirichlet).cell(e.potential).cell(e.offset);
  doc.end_row();
  return doc.text();
}

}  // namespace nematorus::io
