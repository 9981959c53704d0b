#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "vtrecon/mesh.hpp"
#include "vtrecon/sensing.hpp"
#include "vtrecon/session.hpp"
#include "vtrecon/template_fit.hpp"

namespace vtrecon {

// Plain-text record of a session, enough to rebuild any iteration's
// estimate offline:
//
//   vtrecon-session 1
//   faces <F>
//   <a> <b> <c>                       (F lines; shared by every iteration)
//   iteration <k> <chamfer_m> <cumulative_failures>
//   params <qw qx qy qz tx ty tz sx sy sz>
//   vertices <V>
//   <x> <y> <z> <uncertainty>         (V lines)
//   attractors <N>
//   <x> <y> <z> <uncertainty> <source> (N lines)
//   end

/// Writes the header and the face list on construction.
class SessionLogWriter {
 public:
  SessionLogWriter(std::ostream& out, const TriangleMesh& topology);

  void write_iteration(const SessionState& state, const IterationRecord& record);

 private:
  std::ostream& out_;
};

struct SessionSnapshot {
  int iteration = 0;
  double chamfer = 0.0;
  int cumulative_failures = 0;
  EllipsoidParams params;
  TriangleMesh estimate;
  std::vector<double> uncertainty;
  std::vector<Attractor> attractors;
};

/// Iteration numbers present in the log, in file order.
std::vector<int> list_iterations(std::istream& in);

/// Throws IoError on a malformed log or when iteration `k` is absent.
SessionSnapshot read_snapshot(std::istream& in, int iteration);
SessionSnapshot load_snapshot(const std::filesystem::path& path, int iteration);

}  // namespace vtrecon
