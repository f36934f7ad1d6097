#pragma once

#include <json.hpp>

#include "flatlab/cantor.hpp"
#include "flatlab/flows.hpp"
#include "flatlab/nondiv.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

using json = nlohmann::json;

// Matrices serialize as row-major 4-arrays, holonomies as [x, y].
json mat_to_json(const Mat2& m);
Mat2 mat_from_json(const json& j);

json holonomy_to_json(const Holonomy& h);

json polygon_to_json(const PolygonSpec& p);
PolygonSpec polygon_from_json(const json& j);

// {"kind":"torus"} | {"kind":"square_tiled","n":3,"right":[2,3,1],"up":[2,1,3]}
// | {"kind":"unfolded","polygon":{...}}, each with an optional "frame".
// Permutations are 1-based images in JSON.
json surface_to_json(const Surface& s);
Surface surface_from_json(const json& j);

json saddleset_to_json(const SaddleSet& s);

json cantor_params_to_json(const CantorParams& p);
CantorParams cantor_params_from_json(const json& j);

// Stores params, per-level counts, interval endpoints for levels m <= 4,
// and the deepest midpoints (capped at 100000 entries).
json tree_to_json(const CantorTree& t);
CantorTree tree_from_json(const json& j);

json decay_fit_to_json(const DecayFit& f);

}  // namespace flatlab
