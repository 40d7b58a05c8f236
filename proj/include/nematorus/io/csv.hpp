#ifndef NEMATORUS_IO_CSV_HPP
#define NEMATORUS_IO_CSV_HPP

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "../discrete_energy.hpp"
#include "../field.hpp"
#include "../geometry.hpp"
#include "../relaxation.hpp"

namespace nematorus::io {

/// Shortest decimal that reads back to the same double; no locale.
std::string format_number(double v);

/// Locale-independent strict parse of a whole token.
double parse_number(std::string_view text);

/// In-memory CSV document with a leading `# ...` comment line.
class CsvDocument {
public:
  CsvDocument(std::string_view comment, std::initializer_list<std::string_view> columns);

  CsvDocument& cell(double v);
  CsvDocument& cell(long long v);
  CsvDocument& cell(std::string_view v);
  void end_row();
  void comment(std::string_view text);

  const std::string& text() const { return text_; }

private:
  void separator();

  std::string text_;
  bool row_open_ = false;
};

/// Write through a sibling temporary and rename, so readers never see a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Field snapshot: theta,phi,alpha,u,nx,ny,nz,energy_density, theta-major.
std::string field_csv(const AngleField<double>& field, const TorusGeometry<double>& geom,
                      const ElasticConstants<double>& k, std::string_view comment);

/// Flow history step,t,energy,max_rhs,dissipation plus a `# summary` line.
std::string history_csv(const FlowReport<double>& report, std::string_view comment);

/// total,splay,twist,bend_intrinsic,bend_extrinsic,dirichlet,potential,offset
std::string breakdown_csv(const EnergyBreakdown<double>& e, std::string_view comment);

}  // namespace nematorus::io

#endif
