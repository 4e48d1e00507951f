#ifndef APBW_SHA256_HPP
#define APBW_SHA256_HPP

#include <string>

namespace apbw {

// hex digest of the canonical input document, used as the report input_digest
std::string sha256_hex(const std::string& data);

} // namespace apbw

#endif
