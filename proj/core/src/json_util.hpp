#pragma once

#include <json.hpp>

namespace batchlens::detail {
using Json = nlohmann::ordered_json;
}
