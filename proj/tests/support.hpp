#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cctrack/program.hpp"
#include "cctrack/syntax.hpp"

namespace testsupport {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpusPath(const std::string& name) {
  return std::string(CCTRACK_CORPUS_DIR) + "/" + name;
}

// Context built from assume lines, e.g. "assume y : {} Top\nassume x : {*} Top".
inline cctrack::Context contextOf(const std::string& assumptions,
                                  cctrack::Extensions ext = cctrack::Extensions::all()) {
  return cctrack::elaborate(cctrack::parseProgram(assumptions, ext)).gamma;
}

inline cctrack::TypeRef ty(const std::string& s) { return cctrack::parseType(s); }
inline cctrack::TermRef tm(const std::string& s) { return cctrack::parseTerm(s); }

}  // namespace testsupport
