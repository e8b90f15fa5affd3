#include "spectriple/errors.hpp"

namespace spectriple {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::size_limit: return "size-limit";
    case ErrorKind::parse: return "parse";
    case ErrorKind::metric_axiom: return "metric-axiom";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::insufficient_chain: return "insufficient-chain";
    case ErrorKind::degenerate_pair: return "degenerate-pair";
    case ErrorKind::empty_triple: return "empty-triple";
    case ErrorKind::oracle_size: return "oracle-size";
    case ErrorKind::range: return "range";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace spectriple
