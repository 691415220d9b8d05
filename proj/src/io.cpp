#include "aet/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace aet {

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    return out;
}

void check_size(std::size_t got, std::size_t want, const std::string& name) {
    if (got != want) throw std::invalid_argument("VTK array '" + name + "' has the wrong length");
}

}  // namespace

VtkWriter& VtkWriter::point_scalar(std::string name, std::span<const double> values) {
    check_size(values.size(), mesh_.node_count(), name);
    point_arrays_.push_back({std::move(name), {values.begin(), values.end()}, 1});
    return *this;
}

VtkWriter& VtkWriter::point_vector(std::string name, std::span<const Vec2> values) {
    check_size(values.size(), mesh_.node_count(), name);
    std::vector<double> flat;
    flat.reserve(values.size() * 2);
    for (const auto& v : values) {
        flat.push_back(v.x);
        flat.push_back(v.y);
    }
    point_arrays_.push_back({std::move(name), std::move(flat), 2});
    return *this;
}

VtkWriter& VtkWriter::cell_scalar(std::string name, std::span<const double> values) {
    check_size(values.size(), mesh_.triangle_count(), name);
    cell_arrays_.push_back({std::move(name), {values.begin(), values.end()}, 1});
    return *this;
}

VtkWriter& VtkWriter::cell_vector(std::string name, std::span<const Vec2> values) {
    check_size(values.size(), mesh_.triangle_count(), name);
    std::vector<double> flat;
    flat.reserve(values.size() * 2);
    for (const auto& v : values) {
        flat.push_back(v.x);
        flat.push_back(v.y);
    }
    cell_arrays_.push_back({std::move(name), std::move(flat), 2});
    return *this;
}

void VtkWriter::write(const std::string& path) const {
    auto out = open_for_write(path);
    out << "# vtk DataFile Version 3.0\n"
        << "aetlab unit disk mesh\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh_.node_count() << " double\n";
    for (const auto& p : mesh_.nodes()) out << p.x << ' ' << p.y << " 0\n";
    out << "CELLS " << mesh_.triangle_count() << ' ' << 4 * mesh_.triangle_count() << '\n';
    for (const auto& t : mesh_.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh_.triangle_count() << '\n';
    for (std::size_t c = 0; c < mesh_.triangle_count(); ++c) out << "5\n";

    auto emit = [&out](const Array& a) {
        if (a.components == 1) {
            out << "SCALARS " << a.name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : a.data) out << v << '\n';
        } else {
            out << "VECTORS " << a.name << " double\n";
            for (std::size_t i = 0; i < a.data.size(); i += 2) out << a.data[i] << ' ' << a.data[i + 1] << " 0\n";
        }
    };
    if (!point_arrays_.empty()) {
        out << "POINT_DATA " << mesh_.node_count() << '\n';
        for (const auto& a : point_arrays_) emit(a);
    }
    if (!cell_arrays_.empty()) {
        out << "CELL_DATA " << mesh_.triangle_count() << '\n';
        for (const auto& a : cell_arrays_) emit(a);
    }
}

void write_nodal_csv(const TriangleMesh& mesh, const std::string& path,
                     const std::vector<std::pair<std::string, std::span<const double>>>& columns,
                     const std::string& comment) {
    for (const auto& [name, values] : columns) {
        if (values.size() != mesh.node_count()) {
            throw std::invalid_argument("CSV column '" + name + "' has the wrong length");
        }
    }
    auto out = open_for_write(path);
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "node,x,y";
    for (const auto& c : columns) out << ',' << c.first;
    out << '\n';
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        out << i << ',' << mesh.node(i).x << ',' << mesh.node(i).y;
        for (const auto& c : columns) out << ',' << c.second[i];
        out << '\n';
    }
}

void ensure_directory(const std::string& path) {
    if (path.empty()) return;
    std::filesystem::create_directories(path);
}

}  // namespace aet
