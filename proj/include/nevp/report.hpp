#ifndef NEVP_REPORT_HPP
#define NEVP_REPORT_HPP

#include <string>
#include <vector>

#include "nevp/config.hpp"
#include "nevp/evans.hpp"
#include "nevp/extract.hpp"
#include "nevp/fhn.hpp"

namespace nevp {

/// Run metadata persisted next to the numeric artifacts.
struct RunReport {
  std::string schema = "nevp-report-v1";
  std::string command;       ///< solve | sweep | evans | pulse
  std::string config_text;   ///< verbatim config file contents
  unsigned seed = 0;
  int workers = 1;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Compiler / library / platform fingerprint string.
std::string environment_fingerprint();

/// JSON report; spectrum / winding / pulse sections are included when the
/// corresponding pointer is non-null.
void write_report_json(const std::string& path, const RunReport& report,
                       const SpectrumResult* spectrum = nullptr,
                       const WindingResult* winding = nullptr,
                       const PulseSolution* pulse = nullptr);

/// CSV writers.  All numbers are printed with %.17g so identical runs produce
/// identical bytes.
void write_spectrum_csv(const std::string& path, const SpectrumResult& result);
void write_samples_csv(const std::string& path, const SampleSet& samples);
void write_gridfunction_csv(const std::string& path, const GridFunction& f);
void write_evans_csv(const std::string& path, const Contour& contour,
                     const WindingResult& winding);
void write_interval_sweep_csv(const std::string& path,
                              const std::vector<IntervalSweepRow>& rows);
void write_quadrature_sweep_csv(const std::string& path,
                                const std::vector<QuadratureSweepRow>& rows);
void write_rank_sweep_csv(const std::string& path,
                          const std::vector<RankSweepRow>& rows);

}  // namespace nevp

#endif
