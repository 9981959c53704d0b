#include "vtrecon/session_log.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "vtrecon/errors.hpp"

namespace vtrecon {

namespace {

constexpr const char* kMagic = "vtrecon-session";
constexpr int kVersion = 1;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& line) {
    std::string text;
    while (std::getline(in_, text)) {
      ++number_;
      if (!text.empty() && text.back() == '\r') {
        text.pop_back();
      }
      if (!text.empty()) {
        line.clear();
        line.str(text);
        return true;
      }
    }
    return false;
  }

  void require(std::istringstream& line, const char* what) {
    if (!next(line)) {
      fail(std::string("unexpected end of file, expected ") + what);
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("session log line " + std::to_string(number_) + ": " + what);
  }

  std::size_t count(std::istringstream& line, const char* keyword) {
    std::string word;
    long long n = -1;
    if (!(line >> word >> n) || word != keyword || n < 0) {
      fail(std::string("expected '") + keyword + " <count>'");
    }
    return static_cast<std::size_t>(n);
  }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::vector<Face> read_header(LineReader& reader) {
  std::istringstream line;
  reader.require(line, "header");
  std::string magic;
  int version = 0;
  if (!(line >> magic >> version) || magic != kMagic) {
    reader.fail("not a session log");
  }
  if (version != kVersion) {
    reader.fail("unsupported session log version " + std::to_string(version));
  }
  reader.require(line, "face count");
  const std::size_t n = reader.count(line, "faces");
  std::vector<Face> faces(n);
  for (Face& f : faces) {
    reader.require(line, "face");
    if (!(line >> f[0] >> f[1] >> f[2])) {
      reader.fail("malformed face");
    }
  }
  return faces;
}

}  // namespace

SessionLogWriter::SessionLogWriter(std::ostream& out, const TriangleMesh& topology) : out_(out) {
  out_ << kMagic << ' ' << kVersion << '\n' << "faces " << topology.face_count() << '\n';
  for (const Face& f : topology.faces()) {
    out_ << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

void SessionLogWriter::write_iteration(const SessionState& state, const IterationRecord& record) {
  out_ << std::setprecision(17);
  out_ << "iteration " << record.iteration << ' ' << record.chamfer << ' ' << record.cumulative_failures << '\n';
  out_ << "params " << format_params(state.params) << '\n';
  out_ << "vertices " << state.estimate.vertex_count() << '\n';
  for (std::size_t i = 0; i < state.estimate.vertex_count(); ++i) {
    const Vec3& v = state.estimate.vertex(i);
    out_ << v.x() << ' ' << v.y() << ' ' << v.z() << ' ' << state.field.values[i] << '\n';
  }
  out_ << "attractors " << state.attractors.size() << '\n';
  write_attractors(out_, state.attractors);
  out_ << "end\n";
  if (!out_) {
    throw IoError("failed to write session log");
  }
}

std::vector<int> list_iterations(std::istream& in) {
  LineReader reader(in);
  read_header(reader);
  std::vector<int> out;
  std::istringstream line;
  while (reader.next(line)) {
    std::string word;
    line >> word;
    if (word == "iteration") {
      int k = 0;
      if (!(line >> k)) {
        reader.fail("malformed iteration record");
      }
      out.push_back(k);
    }
  }
  return out;
}

SessionSnapshot read_snapshot(std::istream& in, int iteration) {
  LineReader reader(in);
  const std::vector<Face> faces = read_header(reader);
  std::istringstream line;
  while (reader.next(line)) {
    std::string word;
    SessionSnapshot snap;
    if (!(line >> word) || word != "iteration") {
      continue;
    }
    if (!(line >> snap.iteration >> snap.chamfer >> snap.cumulative_failures)) {
      reader.fail("malformed iteration record");
    }
    if (snap.iteration != iteration) {
      continue;
    }

    reader.require(line, "params");
    std::string rest;
    if (!(line >> word) || word != "params" || !std::getline(line, rest)) {
      reader.fail("expected 'params'");
    }
    try {
      snap.params = parse_params(rest);
    } catch (const Error& e) {
      reader.fail(e.what());
    }

    reader.require(line, "vertex count");
    const std::size_t nv = reader.count(line, "vertices");
    std::vector<Vec3> verts(nv);
    snap.uncertainty.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      reader.require(line, "vertex");
      if (!(line >> verts[i].x() >> verts[i].y() >> verts[i].z() >> snap.uncertainty[i])) {
        reader.fail("malformed vertex");
      }
    }

    reader.require(line, "attractor count");
    const std::size_t na = reader.count(line, "attractors");
    std::ostringstream block;
    for (std::size_t i = 0; i < na; ++i) {
      reader.require(line, "attractor");
      block << line.str() << '\n';
    }
    std::istringstream block_in(block.str());
    snap.attractors = read_attractors(block_in);

    try {
      snap.estimate = TriangleMesh(std::move(verts), faces);
    } catch (const Error& e) {
      reader.fail(std::string("invalid mesh: ") + e.what());
    }
    return snap;
  }
  throw IoError("session log has no iteration " + std::to_string(iteration));
}

SessionSnapshot load_snapshot(const std::filesystem::path& path, int iteration) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open session log " + path.string());
  }
  return read_snapshot(in, iteration);
}

}  // namespace vtrecon
