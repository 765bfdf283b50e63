// Generates small watertight OBJ meshes for trying out the pipeline.
#include <CLI11.hpp>

#include "voxhalf/shapes.hpp"

using namespace voxhalf;

int main(int argc, char** argv) {
    CLI::App app{"mkmesh: generate watertight test meshes (OBJ)"};
    std::string shape = "sphere";
    std::string out = "mesh.obj";
    double size = 10.0, radius = 5.0, tube = 2.0, gap = 4.0, thickness = 1.0;
    int segments = 96, rings = 48;
    std::string gradient;  // e.g. "z:1,0,0:0,0,1"
    app.add_option("--shape", shape, "plate | cube | sphere | torus | twospheres")
        ->check(CLI::IsMember({"plate", "cube", "sphere", "torus", "twospheres"}));
    app.add_option("--size", size, "edge length (cube) or plate width/depth, mm");
    app.add_option("--thickness", thickness, "plate thickness, mm");
    app.add_option("--radius", radius, "sphere/torus major radius, mm");
    app.add_option("--tube", tube, "torus tube radius, mm");
    app.add_option("--gap", gap, "twospheres gap, mm");
    app.add_option("--segments", segments, "segments around");
    app.add_option("--rings", rings, "rings pole to pole");
    app.add_option("--gradient", gradient,
                   "paint vertex colors: axis:r,g,b:r,g,b (e.g. z:1,1,1:0,0,0)");
    app.add_option("-o,--out", out, "output OBJ path");
    CLI11_PARSE(app, argc, argv);

    Mesh m;
    if (shape == "plate")
        m = make_plate({size, size, thickness});
    else if (shape == "cube")
        m = make_cube(size);
    else if (shape == "sphere")
        m = make_sphere(radius, segments, rings);
    else if (shape == "torus")
        m = make_torus(radius, tube, segments, rings);
    else
        m = make_two_spheres(radius, gap, segments, rings);

    if (!gradient.empty()) {
        int axis;
        Vec3d c0, c1;
        char ax;
        if (std::sscanf(gradient.c_str(), "%c:%lf,%lf,%lf:%lf,%lf,%lf", &ax, &c0.x, &c0.y, &c0.z,
                        &c1.x, &c1.y, &c1.z) != 7 ||
            (ax != 'x' && ax != 'y' && ax != 'z')) {
            std::fprintf(stderr, "bad --gradient, expected axis:r,g,b:r,g,b\n");
            return 2;
        }
        axis = ax - 'x';
        paint_vertex_gradient(m, axis, c0, c1);
    }

    save_obj(m, out);
    std::printf("%s: %zu vertices, %zu triangles\n", out.c_str(), m.positions.size(),
                m.triangles.size());
    return 0;
}
