#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "rangeudf/common.hpp"
#include "rangeudf/mesh.hpp"
#include "rangeudf/model.hpp"

namespace testutil {

struct GradCheckStats {
    double max_rel = 0;
    std::int64_t checked = 0;
    std::int64_t kink_skipped = 0;  // entries whose perturbation crosses an activation kink
};

// Finite-difference oracle for graphs built through the real model code path
// (f64 instantiation). `build` receives a fresh tape plus bank and must
// return a scalar loss; gradients of `check` parameters are compared against
// central differences. Entries where the half-step and full-step difference
// quotients disagree sit on a ReLU/LeakyReLU kink; the quotient is not the
// derivative there, so they are excluded (and counted). `per_tensor_cap`
// subsamples large tensors deterministically to bound runtime (0 = all).
template <class BuildLoss>
GradCheckStats model_grad_check(rangeudf::ModelParamsT<double>& model, const BuildLoss& build,
                                const std::vector<rangeudf::ParamT<double>*>& check, double h = 1e-3,
                                std::int64_t per_tensor_cap = 0, std::uint64_t sample_seed = 0) {
    using namespace rangeudf;
    auto eval = [&]() {
        TapeT<double> tape;
        ParamBankT<double> bank(tape, false);
        return build(tape, bank, model)->value.data[0];
    };

    {
        TapeT<double> tape;
        ParamBankT<double> bank(tape, true);
        auto loss = build(tape, bank, model);
        tape.backward(loss);
        auto all = model.parameters();
        for (auto* p : all) p->zero_grad();
        bank.harvest();
    }

    GradCheckStats stats;
    rangeudf::Rng pick(rangeudf::derive_seed(sample_seed, 0x6c4dull));
    for (auto* p : check) {
        std::vector<std::int64_t> entries;
        if (per_tensor_cap > 0 && p->value.numel() > per_tensor_cap) {
            for (std::int64_t j = 0; j < per_tensor_cap; ++j)
                entries.push_back(static_cast<std::int64_t>(pick.uniform_index(p->value.numel())));
        } else {
            entries.resize(p->value.numel());
            for (std::int64_t j = 0; j < p->value.numel(); ++j) entries[j] = j;
        }
        for (std::int64_t i : entries) {
            double orig = p->value.data[i];
            p->value.data[i] = orig + h;
            double fp = eval();
            p->value.data[i] = orig - h;
            double fm = eval();
            p->value.data[i] = orig + h / 2;
            double fp2 = eval();
            p->value.data[i] = orig - h / 2;
            double fm2 = eval();
            p->value.data[i] = orig;
            double fd = (fp - fm) / (2 * h);
            double fd_half = (fp2 - fm2) / h;
            if (std::abs(fd - fd_half) > 1e-5 * std::max({1.0, std::abs(fd), std::abs(fd_half)})) {
                ++stats.kink_skipped;
                continue;
            }
            double an = p->grad.data[i];
            double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            stats.max_rel = std::max(stats.max_rel, std::abs(fd - an) / denom);
            ++stats.checked;
        }
    }
    return stats;
}

// Per-process scratch directory, removed on process exit.
inline std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("rangeudf_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string scratch_file(const std::string& name) {
    return (scratch_dir() / name).string();
}

inline void write_text(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    out << contents;
}

// Random triangle soup in the unit cube: `faces` triangles, 3 fresh vertices each.
inline rangeudf::TriangleMesh random_soup(size_t faces, std::uint64_t seed, float extent = 0.5f) {
    rangeudf::TriangleMesh mesh;
    rangeudf::Rng rng(seed);
    for (size_t f = 0; f < faces; ++f) {
        std::array<std::uint32_t, 3> idx;
        for (int k = 0; k < 3; ++k) {
            idx[k] = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back({static_cast<float>(rng.uniform(-extent, extent)),
                                     static_cast<float>(rng.uniform(-extent, extent)),
                                     static_cast<float>(rng.uniform(-extent, extent))});
        }
        mesh.faces.push_back(idx);
    }
    return mesh;
}

// Axis-aligned cube surface (12 triangles) spanning [lo, hi]^3.
inline rangeudf::TriangleMesh cube_mesh(float lo, float hi) {
    rangeudf::TriangleMesh mesh;
    const float c[2] = {lo, hi};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z) mesh.vertices.push_back({c[x], c[y], c[z]});
    auto v = [](int x, int y, int z) { return static_cast<std::uint32_t>(x * 4 + y * 2 + z); };
    auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c2, std::uint32_t d) {
        mesh.faces.push_back({a, b, c2});
        mesh.faces.push_back({a, c2, d});
    };
    quad(v(0, 0, 0), v(0, 1, 0), v(1, 1, 0), v(1, 0, 0));  // z = lo
    quad(v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1));  // z = hi
    quad(v(0, 0, 0), v(1, 0, 0), v(1, 0, 1), v(0, 0, 1));  // y = lo
    quad(v(0, 1, 0), v(0, 1, 1), v(1, 1, 1), v(1, 1, 0));  // y = hi
    quad(v(0, 0, 0), v(0, 0, 1), v(0, 1, 1), v(0, 1, 0));  // x = lo
    quad(v(1, 0, 0), v(1, 1, 0), v(1, 1, 1), v(1, 0, 1));  // x = hi
    return mesh;
}

// UV-sphere mesh; slices x stacks quads, fan caps at the poles.
inline rangeudf::TriangleMesh uv_sphere(const rangeudf::Vec3f& center, float radius, int stacks = 16,
                                        int slices = 32) {
    rangeudf::TriangleMesh mesh;
    const double pi = 3.14159265358979323846;
    for (int s = 0; s <= stacks; ++s) {
        double phi = pi * s / stacks;
        for (int t = 0; t < slices; ++t) {
            double theta = 2 * pi * t / slices;
            mesh.vertices.push_back({center.x + radius * static_cast<float>(std::sin(phi) * std::cos(theta)),
                                     center.y + radius * static_cast<float>(std::sin(phi) * std::sin(theta)),
                                     center.z + radius * static_cast<float>(std::cos(phi))});
        }
    }
    auto vid = [&](int s, int t) { return static_cast<std::uint32_t>(s * slices + (t % slices)); };
    for (int s = 0; s < stacks; ++s)
        for (int t = 0; t < slices; ++t) {
            mesh.faces.push_back({vid(s, t), vid(s + 1, t), vid(s + 1, t + 1)});
            mesh.faces.push_back({vid(s, t), vid(s + 1, t + 1), vid(s, t + 1)});
        }
    return mesh;
}

}  // namespace testutil
