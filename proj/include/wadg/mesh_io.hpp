#pragma once

// JSON mesh files, schema "wadg-mesh-v1":
//   { "version": "wadg-mesh-v1", "shape": "triangle"|"quadrilateral",
//     "N_geo": int, "K": int,
//     "elem_map_nodes": [[x0, y0, x1, y1, ...], ...]   one row per element,
//     "face_connectivity": [[[elem, face], ...], ...]  [-1, -1] on the boundary,
//     "boundary_tags": [[elem, face, "dirichlet"], ...] }
// Node order within an element follows the reference node ordering of NodalBasis.

#include "wadg/mesh.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace wadg {

inline constexpr const char* kMeshSchemaVersion = "wadg-mesh-v1";

inline nlohmann::json mesh_to_json(const CurvedMesh2D& mesh) {
  nlohmann::json j;
  j["version"] = kMeshSchemaVersion;
  j["shape"] = to_string(mesh.shape);
  j["N_geo"] = mesh.N_geo;
  j["K"] = mesh.K;
  j["h"] = mesh.h;
  auto nodes = nlohmann::json::array();
  auto conn = nlohmann::json::array();
  auto tags = nlohmann::json::array();
  for (int k = 0; k < mesh.K; ++k) {
    auto row = nlohmann::json::array();
    for (int i = 0; i < mesh.Np_geo(); ++i) {
      row.push_back(mesh.x(i, k));
      row.push_back(mesh.y(i, k));
    }
    nodes.push_back(std::move(row));
    auto fc = nlohmann::json::array();
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const auto& nb = mesh.face_connectivity[k][f];
      fc.push_back({nb.elem, nb.face});
      if (nb.boundary()) tags.push_back({k, f, "dirichlet"});
    }
    conn.push_back(std::move(fc));
  }
  j["elem_map_nodes"] = std::move(nodes);
  j["face_connectivity"] = std::move(conn);
  j["boundary_tags"] = std::move(tags);
  return j;
}

/// Parses a mesh document. Throws MeshError on schema violations and on
/// connectivity that is not symmetric.
inline CurvedMesh2D mesh_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kMeshSchemaVersion)
      throw MeshError("unsupported mesh schema version '" + j.at("version").get<std::string>() + "'");
    CurvedMesh2D mesh;
    const std::string shape = j.at("shape").get<std::string>();
    if (shape == "triangle") mesh.shape = ElementShape::Triangle;
    else if (shape == "quadrilateral") mesh.shape = ElementShape::Quadrilateral;
    else throw MeshError("unknown element shape '" + shape + "'");
    mesh.N_geo = j.at("N_geo").get<int>();
    mesh.K = j.at("K").get<int>();
    if (mesh.N_geo < 1 || mesh.K < 1) throw MeshError("N_geo and K must be positive");
    const int Npg = basis_dim(mesh.shape, mesh.N_geo);
    const auto& nodes = j.at("elem_map_nodes");
    if (static_cast<int>(nodes.size()) != mesh.K) throw MeshError("elem_map_nodes has the wrong number of rows");
    mesh.x.resize(Npg, mesh.K);
    mesh.y.resize(Npg, mesh.K);
    for (int k = 0; k < mesh.K; ++k) {
      const auto& row = nodes[k];
      if (static_cast<int>(row.size()) != 2 * Npg) throw MeshError("element " + std::to_string(k) + " has the wrong node count");
      for (int i = 0; i < Npg; ++i) {
        mesh.x(i, k) = row[2 * i].get<double>();
        mesh.y(i, k) = row[2 * i + 1].get<double>();
      }
    }
    const int Nf = mesh.num_faces();
    if (j.contains("face_connectivity")) {
      const auto& conn = j.at("face_connectivity");
      if (static_cast<int>(conn.size()) != mesh.K) throw MeshError("face_connectivity has the wrong number of rows");
      mesh.face_connectivity.assign(mesh.K, std::vector<FaceNeighbor>(Nf));
      for (int k = 0; k < mesh.K; ++k) {
        if (static_cast<int>(conn[k].size()) != Nf) throw MeshError("face_connectivity row has the wrong length");
        for (int f = 0; f < Nf; ++f) {
          const int e = conn[k][f].at(0).get<int>(), g = conn[k][f].at(1).get<int>();
          if (e >= mesh.K || (e >= 0 && (g < 0 || g >= Nf))) throw MeshError("face_connectivity entry out of range");
          mesh.face_connectivity[k][f] = e < 0 ? FaceNeighbor{} : FaceNeighbor{e, g};
        }
      }
      for (int k = 0; k < mesh.K; ++k)
        for (int f = 0; f < Nf; ++f) {
          const auto nb = mesh.face_connectivity[k][f];
          if (nb.boundary()) continue;
          const auto back = mesh.face_connectivity[nb.elem][nb.face];
          if (back.elem != k || back.face != f) throw MeshError("face_connectivity is not symmetric");
        }
    } else {
      build_connectivity(mesh);
    }
    mesh.h = j.contains("h") ? j.at("h").get<double>() : max_element_diameter(mesh);
    validate_jacobian(mesh);
    return mesh;
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(std::string("malformed mesh file: ") + e.what());
  }
}

inline void write_mesh(const std::string& path, const CurvedMesh2D& mesh) {
  std::ofstream os(path);
  if (!os) throw MeshError("cannot open '" + path + "' for writing");
  os << mesh_to_json(mesh).dump(1) << '\n';
}

inline CurvedMesh2D read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MeshError("cannot open mesh file '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MeshError("mesh file '" + path + "' is not valid JSON: " + e.what());
  }
  return mesh_from_json(j);
}

} // namespace wadg
