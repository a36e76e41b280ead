#pragma once

// Stub files, summary emission and the analysis report.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsum/interproc.hpp"
#include "symsum/summary.hpp"

namespace symsum {

class StubError : public std::runtime_error {
 public:
  StubError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

/// Parses a `.secstubs` file. Each entry is a method header followed by a
/// block holding `sink;`, `source p<k>;`, `pessimistic;`, or a guard and
/// effect assignments (`guard := ...; var := ...;`). Unassigned footprint
/// variables keep their bottom value.
std::map<ir::MethodSig, Summary> parseStubs(const std::string& text, HeapModel model,
                                            const std::string& file = "<stubs>");

struct EmitOptions {
  bool verbose_effects = false;  // keep identity assignments
};

/// Listing-style rendering: header, guard, level updates, aliasing updates.
std::string emitSummary(const Summary& s, const EmitOptions& opts = {});

/// The method header used by emission and stub files.
std::string summaryHeader(const Summary& s);

struct ReportCounts {
  std::size_t methods = 0;
  std::size_t inferred = 0;
  std::size_t stubs = 0;
  std::size_t skipped = 0;
  std::size_t guarded = 0;  // guard not canonically tt
  std::size_t flows = 0;    // an argument level reaches the result or another argument's objects
};

/// True when the return level or some argument object level depends on the
/// level of an argument other than the one it describes.
bool hasArgumentFlow(const Summary& s);

ReportCounts countReport(const SummaryTable& t);
std::string renderReport(const SummaryTable& t, const std::vector<std::string>& extra = {});

}  // namespace symsum
