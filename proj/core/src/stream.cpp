#include "ccdyn/stream.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ccdyn {

void write_stream(const UpdateStream& s, std::ostream& out) {
  for (const UpdateOp& op : s) {
    if (op.kind == 'Q')
      out << "Q\n";
    else
      out << op.kind << ' ' << op.u << ' ' << op.v << '\n';
  }
}

UpdateStream read_stream(std::istream& in) {
  UpdateStream s;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string kind;
    if (!(row >> kind)) continue;
    if (kind == "Q") {
      s.push_back({'Q', 0, 0});
      continue;
    }
    if (kind != "F" && kind != "+" && kind != "-")
      throw std::runtime_error("update stream: unknown op '" + kind + "'");
    int64_t u, v;
    if (!(row >> u >> v)) throw std::runtime_error("update stream: missing endpoints");
    s.push_back({kind[0], static_cast<VertexId>(u), static_cast<VertexId>(v)});
  }
  return s;
}

UpdateStream read_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_stream(in);
}

}  // namespace ccdyn
