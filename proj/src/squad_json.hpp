#ifndef SQUADPORT_SRC_SQUAD_JSON_HPP
#define SQUADPORT_SRC_SQUAD_JSON_HPP

// Internal canonical JSON forms shared by the serializer and the progress
// log. Not part of the public API.

#include <json.hpp>

#include "squadport/squad.hpp"

namespace squadport::detail {

nlohmann::json article_to_json(const Article& article);
Article article_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace squadport::detail

#endif  // SQUADPORT_SRC_SQUAD_JSON_HPP
