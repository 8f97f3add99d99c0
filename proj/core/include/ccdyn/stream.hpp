#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccdyn/types.hpp"

namespace ccdyn {

/// One line of an update stream: F u v (flip), + u v (annotated insert),
/// - u v (annotated delete), Q (query: emit a metrics record).
struct UpdateOp {
  char kind = 'F';
  VertexId u = 0;
  VertexId v = 0;
};

using UpdateStream = std::vector<UpdateOp>;

void write_stream(const UpdateStream& s, std::ostream& out);
UpdateStream read_stream(std::istream& in);
UpdateStream read_stream_file(const std::string& path);

}  // namespace ccdyn
