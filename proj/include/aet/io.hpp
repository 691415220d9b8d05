#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aet/mesh.hpp"

namespace aet {

/// Legacy ASCII VTK unstructured-grid writer with optional point and cell data.
class VtkWriter {
public:
    explicit VtkWriter(const TriangleMesh& mesh) : mesh_(mesh) {}

    VtkWriter& point_scalar(std::string name, std::span<const double> values);
    VtkWriter& point_vector(std::string name, std::span<const Vec2> values);
    VtkWriter& cell_scalar(std::string name, std::span<const double> values);
    VtkWriter& cell_vector(std::string name, std::span<const Vec2> values);

    void write(const std::string& path) const;

private:
    struct Array {
        std::string name;
        std::vector<double> data;
        int components;
    };
    const TriangleMesh& mesh_;
    std::vector<Array> point_arrays_;
    std::vector<Array> cell_arrays_;
};

/// Rows of `node, x, y, <columns...>`; a leading `# <comment>` line when non-empty.
void write_nodal_csv(const TriangleMesh& mesh, const std::string& path,
                     const std::vector<std::pair<std::string, std::span<const double>>>& columns,
                     const std::string& comment = {});

/// Creates the directory (and parents) if missing.
void ensure_directory(const std::string& path);

}  // namespace aet
