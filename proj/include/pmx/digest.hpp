// SHA-256 helpers for the event-log digest chain and vote commitments.
#pragma once

#include <string>
#include <string_view>

namespace pmx {

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view data);

// Commitment digest for a commit-reveal ballot. Binds voter identity so a
// digest cannot be replayed by another voter.
std::string commit_digest(std::string_view voter, std::string_view outcome,
                          std::string_view salt);

}  // namespace pmx
