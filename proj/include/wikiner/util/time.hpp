#pragma once

#include <string>

namespace wikiner::util {

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

}  // namespace wikiner::util
