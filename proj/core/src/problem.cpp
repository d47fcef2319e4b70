#include "isosum/problem.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace isosum {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

std::string where(std::size_t line) {
    return line == 0 ? std::string("command line") : "line " + std::to_string(line);
}

int to_int(const std::string& token, std::size_t line, const std::string& key) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (token.empty() || used != token.size()) {
        throw SpecError(where(line) + ", field '" + key + "': '" + token + "' is not an integer",
                        line, key);
    }
    return v;
}

double to_double(const std::string& token, std::size_t line, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (token.empty() || used != token.size()) {
        throw SpecError(where(line) + ", field '" + key + "': '" + token + "' is not a number",
                        line, key);
    }
    return v;
}

std::vector<int> int_list(const std::string& value, std::size_t line, const std::string& key) {
    std::vector<int> out;
    for (const auto& t : split_list(value)) {
        out.push_back(to_int(t, line, key));
    }
    return out;
}

std::vector<double> double_list(const std::string& value, std::size_t line, const std::string& key) {
    std::vector<double> out;
    for (const auto& t : split_list(value)) {
        out.push_back(to_double(t, line, key));
    }
    return out;
}

// knots0, geometry_knots2, ... -> direction index, or -1.
int indexed_key(const std::string& key, const std::string& prefix) {
    if (key.size() != prefix.size() + 1 || key.compare(0, prefix.size(), prefix) != 0) {
        return -1;
    }
    const char c = key.back();
    return c >= '0' && c <= '2' ? c - '0' : -1;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw SpecError("field '" + field + "': " + what, 0, field);
}

std::vector<int> broadcast(const std::vector<int>& v, int dim) {
    if (v.size() == 1) {
        return std::vector<int>(static_cast<std::size_t>(dim), v.front());
    }
    return v;
}

}  // namespace

void ProblemSpec::set(const std::string& key, const std::string& value, std::size_t line) {
    if (int i = indexed_key(key, "knots"); i >= 0) {
        if (knots.size() <= static_cast<std::size_t>(i)) {
            knots.resize(static_cast<std::size_t>(i) + 1);
        }
        knots[static_cast<std::size_t>(i)] = double_list(value, line, key);
    } else if (int j = indexed_key(key, "geometry_knots"); j >= 0) {
        if (geometry_knots.size() <= static_cast<std::size_t>(j)) {
            geometry_knots.resize(static_cast<std::size_t>(j) + 1);
        }
        geometry_knots[static_cast<std::size_t>(j)] = double_list(value, line, key);
    } else if (key == "dim") {
        dim = to_int(value, line, key);
    } else if (key == "order") {
        order = int_list(value, line, key);
    } else if (key == "elements") {
        elements = int_list(value, line, key);
    } else if (key == "quad_k") {
        quad_k = to_int(value, line, key);
    } else if (key == "geometry") {
        geometry = value;
    } else if (key == "geometry_order") {
        geometry_order = int_list(value, line, key);
    } else if (key == "control_points") {
        control_points = double_list(value, line, key);
    } else if (key == "weights") {
        weights = double_list(value, line, key);
    } else if (key == "pde") {
        pde = value;
    } else if (key == "convection") {
        convection = double_list(value, line, key);
    } else if (key == "reaction") {
        reaction = to_double(value, line, key);
    } else if (key == "strategy") {
        strategy = value;
    } else if (key == "box_sizes") {
        box_sizes = int_list(value, line, key);
    } else if (key == "direction_policy") {
        direction_policy = value;
    } else if (key == "narrow_direction") {
        narrow_direction = to_int(value, line, key);
    } else if (key == "threads") {
        threads = to_int(value, line, key);
    } else {
        throw SpecError(where(line) + ": unknown field '" + key + "'", line, key);
    }
}

std::vector<int> ProblemSpec::orders() const { return broadcast(order, dim); }
std::vector<int> ProblemSpec::element_counts() const { return broadcast(elements, dim); }

void ProblemSpec::validate() const {
    if (dim < 1 || dim > 3) {
        fail("dim", "must be 1, 2 or 3");
    }
    const auto o = orders();
    if (static_cast<int>(o.size()) != dim) {
        fail("order", "expected 1 or " + std::to_string(dim) + " values");
    }
    for (const int v : o) {
        if (v < 1 || v > 20) {
            fail("order", "orders must lie in 1..20");
        }
    }
    if (!knots.empty()) {
        if (static_cast<int>(knots.size()) != dim) {
            fail("knots", "give knots0 .. knots" + std::to_string(dim - 1));
        }
        for (const auto& k : knots) {
            if (k.empty()) {
                fail("knots", "missing knot vector");
            }
        }
    } else {
        const auto e = element_counts();
        if (static_cast<int>(e.size()) != dim) {
            fail("elements", "expected 1 or " + std::to_string(dim) + " values");
        }
        for (const int v : e) {
            if (v < 1) {
                fail("elements", "element counts must be positive");
            }
        }
    }
    if (quad_k < 0 || quad_k > 64) {
        fail("quad_k", "must lie in 0..64");
    }
    const std::string d = std::to_string(dim);
    if (geometry == "quarter_annulus" && dim != 2) {
        fail("geometry", "quarter_annulus is two-dimensional");
    }
    if (geometry == "twisted_box" && dim != 3) {
        fail("geometry", "twisted_box is three-dimensional");
    }
    if (geometry == "custom") {
        if (static_cast<int>(broadcast(geometry_order, dim).size()) != dim ||
            static_cast<int>(geometry_knots.size()) != dim || control_points.empty()) {
            fail("geometry", "custom geometry needs geometry_order, geometry_knots0.. and control_points");
        }
    } else if (geometry != "identity" && geometry != "affine" && geometry != "identity" + d + "d" &&
               geometry != "affine" + d + "d" && geometry != "quarter_annulus" && geometry != "twisted_box") {
        fail("geometry", "unknown geometry '" + geometry + "' for dim " + d);
    }
    if (pde != "laplace" && pde != "mass" && pde != "convdiff") {
        fail("pde", "unknown pde '" + pde + "' (laplace, mass, convdiff)");
    }
    if (!convection.empty() && static_cast<int>(convection.size()) != dim) {
        fail("convection", "expected " + d + " components");
    }
    if (strategy != "naive" && strategy != "global" && strategy != "element" && strategy != "macro" &&
        strategy != "narrow") {
        fail("strategy", "unknown strategy '" + strategy + "'");
    }
    if (!box_sizes.empty() && static_cast<int>(box_sizes.size()) != dim) {
        fail("box_sizes", "expected " + d + " values");
    }
    if (direction_policy != "auto" && direction_policy != "fixed") {
        fail("direction_policy", "must be auto or fixed");
    }
    if (narrow_direction >= dim || narrow_direction < -1) {
        fail("narrow_direction", "out of range");
    }
    if (threads < 1) {
        fail("threads", "must be positive");
    }
}

ProblemSpec parse_problem(std::istream& in) {
    ProblemSpec spec;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw SpecError("line " + std::to_string(line) + ": expected 'key = value'", line, "");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw SpecError("line " + std::to_string(line) + ": empty key", line, "");
        }
        spec.set(key, value, line);
    }
    return spec;
}

ProblemSpec parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open problem file '" + path + "'");
    }
    return parse_problem(in);
}

GeometryMap resolve_geometry(const ProblemSpec& spec) {
    const std::string d = std::to_string(spec.dim);
    if (spec.geometry == "identity") {
        return builtin_geometry("identity" + d + "d");
    }
    if (spec.geometry == "affine") {
        return builtin_geometry("affine" + d + "d");
    }
    if (spec.geometry == "custom") {
        GeometryMap g;
        const auto o = broadcast(spec.geometry_order, spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
            g.bases.emplace_back(KnotVector(o[static_cast<std::size_t>(i)], spec.geometry_knots[static_cast<std::size_t>(i)]));
        }
        g.control_points = spec.control_points;
        g.weights = spec.weights;
        g.validate();
        return g;
    }
    return builtin_geometry(spec.geometry);
}

PDEData resolve_pde(const ProblemSpec& spec) {
    if (spec.pde == "mass") {
        return mass_pde();
    }
    if (spec.pde == "convdiff") {
        auto b = spec.convection;
        if (b.empty()) {
            b.assign(static_cast<std::size_t>(spec.dim), 1.0);
        }
        return convection_diffusion_pde(std::move(b), spec.reaction);
    }
    return laplace_pde();
}

BuiltProblem build_problem(const ProblemSpec& spec) {
    spec.validate();
    const auto o = spec.orders();
    std::vector<UnivariateBasis> bases;
    std::vector<QuadratureRule1D> rules;
    for (int i = 0; i < spec.dim; ++i) {
        const int p = o[static_cast<std::size_t>(i)];
        KnotVector kv = spec.knots.empty()
                            ? KnotVector::uniform(p, spec.element_counts()[static_cast<std::size_t>(i)])
                            : KnotVector(p, spec.knots[static_cast<std::size_t>(i)]);
        bases.emplace_back(std::move(kv));
        rules.push_back(per_element_rule(bases.back().breakpoints(), spec.quad_k > 0 ? spec.quad_k : p));
    }
    BuiltProblem out{AssemblyProblem{bases, bases, TensorQuadrature(std::move(rules)), {}}, resolve_geometry(spec),
                     resolve_pde(spec)};
    out.problem.coeff = build_coefficient_field(eval_geometry(out.geometry, out.problem.quad), out.pde);
    out.problem.validate();
    return out;
}

Partition build_partition(const ProblemSpec& spec, const AssemblyProblem& problem) {
    if (spec.strategy == "naive" || spec.strategy == "global") {
        return make_partition(problem.trial, PartitionStrategy::global);
    }
    return make_partition(problem.trial, parse_strategy(spec.strategy), spec.box_sizes, spec.narrow_direction);
}

DirectionPolicy parse_policy(const std::string& name) {
    if (name == "auto") {
        return DirectionPolicy::automatic;
    }
    if (name == "fixed") {
        return DirectionPolicy::fixed;
    }
    throw ArgumentError("unknown direction policy '" + name + "'");
}

}  // namespace isosum
