#pragma once

#include "json.hpp"

#include "ddff/lightfield.hpp"

namespace ddff {

void to_json(nlohmann::json& j, const MainLens& m);
void from_json(const nlohmann::json& j, MainLens& m);
void to_json(nlohmann::json& j, const CameraIntrinsics& c);
/// Missing keys keep their current values.
void from_json(const nlohmann::json& j, CameraIntrinsics& c);

}  // namespace ddff
