#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "invariants.hpp"
#include "wall.hpp"

namespace refinv {

using ojson = nlohmann::ordered_json;

// ---- schema-versioned JSON forms of the core objects ----

ojson degree_to_json(const ToricDegree& degree);
// Returns raw entry vectors plus the optional explicit side labels.
std::pair<std::vector<IVec>, std::optional<std::vector<int>>> degree_from_json(const ojson& j);

ojson polygon_to_json(const LatticePolygon& poly, const PolygonMetrics& metrics);

ojson constraint_to_json(const BoundaryConstraint& w);
BoundaryConstraint constraint_from_json(const DegreeContext& ctx, const ojson& j);

ojson curve_to_json(const RationalCurve& curve);
RationalCurve curve_from_json(const DegreeContext& ctx, const ojson& j);
ojson curves_to_json(const std::vector<RationalCurve>& curves);
std::vector<RationalCurve> curves_from_json(const DegreeContext& ctx, const ojson& j);

ojson nodes_to_json(const std::vector<NodeRecord>& nodes);
ojson qi_to_json(const QiResult& qi);
ojson table_to_json(const InvariantTable& table);
InvariantTable table_from_json(const ojson& j);
ojson trace_to_json(const TraceRecord& trace);
ojson verify_to_json(const VerifyReport& rep);

// Plain-text table: header two_kappa,W0,W0_tilde and one row per key,
// ascending.
std::string table_to_csv(const InvariantTable& table);

// ---- determinism helpers ----

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Run manifest: records tool version, command, seed, option values and input
// digests.  Contains no clocks or machine identifiers, so identical runs
// produce identical manifests (and identical artifacts embedding them).
ojson make_manifest(const std::string& command, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& input_digests,
                    const ojson& options);

// Content-addressed result cache: maps the digest of a manifest to the bytes
// of the artifact produced under it.
class ResultCache {
 public:
  explicit ResultCache(std::string dir) : dir_(std::move(dir)) {}
  static std::string key_for(const ojson& manifest);
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& payload) const;

 private:
  std::string dir_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& payload);

// Moment-map plot data: CSV polylines "series,label,u,v" containing the
// polygon outline, the sampled real branch of each curve, and one marker row
// per real node.  Coordinates are the algebraic moment map of the polygon.
std::string emit_plot_data(const DegreeContext& ctx,
                           const std::vector<RationalCurve>& curves);

}  // namespace refinv
