#include "minklab/io.hpp"

#include <fstream>
#include <sstream>

namespace minklab {

namespace {

std::vector<std::vector<double>> rows_of(std::span<const double> flat, int dim) {
    std::vector<std::vector<double>> rows;
    const std::size_t count = flat.size() / dim;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        rows.emplace_back(flat.begin() + i * dim, flat.begin() + (i + 1) * dim);
    return rows;
}

std::vector<double> flat_of(const json& rows, int dim, const char* what) {
    std::vector<double> flat;
    for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw Error(std::string(what) + ": each row must hold exactly 'dim' numbers");
        for (const auto& v : row) flat.push_back(v.get<double>());
    }
    return flat;
}

void expect_schema(const json& j, const std::string& schema) {
    if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema)
        throw Error("expected a document with schema \"" + schema + "\"");
}

std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string grid_kind_name(GridKind kind) {
    return kind == GridKind::product ? "product" : "monte_carlo";
}

GridKind grid_kind_from_name(const std::string& name) {
    if (name == "product") return GridKind::product;
    if (name == "monte_carlo") return GridKind::monte_carlo;
    throw Error("unknown grid kind \"" + name + "\" (expected product or monte_carlo)");
}

json grid_spec_to_json(const GridSpec& spec) {
    return json{{"dim", spec.dim},
                {"kind", grid_kind_name(spec.kind)},
                {"resolution", spec.resolution},
                {"seed", spec.seed}};
}

GridSpec grid_spec_from_json(const json& j) {
    GridSpec spec;
    spec.dim = j.at("dim").get<int>();
    spec.kind = grid_kind_from_name(j.at("kind").get<std::string>());
    spec.resolution = j.at("resolution").get<int>();
    spec.seed = j.value("seed", std::uint64_t{1});
    return spec;
}

json measure_to_json(const DiscreteMeasure& mu) {
    return json{{"schema", "measure"},
                {"dim", mu.dim},
                {"atoms", rows_of(mu.atoms, mu.dim)},
                {"weights", mu.weights},
                {"even", mu.even}};
}

DiscreteMeasure measure_from_json(const json& j) {
    expect_schema(j, "measure");
    DiscreteMeasure mu;
    mu.dim = j.at("dim").get<int>();
    mu.atoms = flat_of(j.at("atoms"), mu.dim, "measure atoms");
    mu.weights = j.at("weights").get<std::vector<double>>();
    mu.even = j.value("even", false);
    if (mu.atoms.size() != mu.weights.size() * mu.dim)
        throw Error("measure: atoms and weights disagree in count");
    return mu;
}

json star_body_to_json(const StarBody& body) {
    json j{{"schema", "star_body"}, {"dim", body.dim()}, {"even", body.even()}};
    if (const Ball* b = std::get_if<Ball>(&body.shape())) {
        j["variant"] = "ball";
        j["radius"] = b->radius;
    } else if (const Ellipsoid* e = std::get_if<Ellipsoid>(&body.shape())) {
        j["variant"] = "ellipsoid";
        j["semi_axes"] = e->semi_axes;
        if (!e->rotation.empty())
            j["rotation"] = rows_of(e->rotation, static_cast<int>(e->semi_axes.size()));
    } else {
        const RadialField& f = std::get<RadialField>(body.shape());
        j["variant"] = "radial_grid";
        j["grid"] = grid_spec_to_json(f.grid->spec());
        j["values"] = f.values;
    }
    return j;
}

StarBody star_body_from_json(const json& j) {
    expect_schema(j, "star_body");
    const int dim = j.at("dim").get<int>();
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "ball") return StarBody::ball(dim, j.at("radius").get<double>());
    if (variant == "ellipsoid") {
        std::vector<double> axes = j.at("semi_axes").get<std::vector<double>>();
        if (static_cast<int>(axes.size()) != dim)
            throw Error("star_body: semi_axes must hold 'dim' entries");
        std::vector<double> rot;
        if (j.contains("rotation")) rot = flat_of(j.at("rotation"), dim, "star_body rotation");
        return StarBody::ellipsoid(std::move(axes), std::move(rot));
    }
    if (variant == "radial_grid") {
        const GridSpec spec = grid_spec_from_json(j.at("grid"));
        if (spec.dim != dim) throw Error("star_body: grid dim differs from body dim");
        auto grid = std::make_shared<SphereGrid>(
            build_grid(spec.dim, spec.resolution, spec.kind, spec.seed));
        return StarBody::radial_field(std::move(grid),
                                      j.at("values").get<std::vector<double>>(),
                                      j.value("even", false));
    }
    throw Error("unknown star_body variant \"" + variant + "\"");
}

json polytope_to_json(const SupportPolytope& k) {
    return json{{"schema", "polytope"},
                {"dim", k.dim},
                {"normals", rows_of(k.normals, k.dim)},
                {"support_numbers", k.support},
                {"even", k.even}};
}

SupportPolytope polytope_from_json(const json& j) {
    expect_schema(j, "polytope");
    SupportPolytope k;
    k.dim = j.at("dim").get<int>();
    k.normals = flat_of(j.at("normals"), k.dim, "polytope normals");
    k.support = j.at("support_numbers").get<std::vector<double>>();
    k.even = j.value("even", false);
    if (k.normals.size() != k.support.size() * k.dim)
        throw Error("polytope: normals and support_numbers disagree in count");
    return k;
}

json config_to_json(const SolveConfig& c) {
    return json{{"schema", "solve_config"},
                {"q", c.q},
                {"grid", json{{"kind", grid_kind_name(c.grid_kind)},
                              {"resolution", c.grid_resolution},
                              {"seed", c.grid_seed}}},
                {"max_iterations", c.max_iterations},
                {"gradient_tolerance", c.gradient_tolerance},
                {"step", json{{"initial", c.step.initial_step},
                              {"backtrack", c.step.backtrack},
                              {"sufficient_decrease", c.step.sufficient_decrease}}},
                {"h_min", c.h_min},
                {"normalization", "max_h_one"},
                {"enforce_even", c.enforce_even},
                {"seed", c.seed},
                {"restarts", c.restarts},
                {"warm_start", c.warm_start},
                {"override_regime", c.override_regime},
                {"mass_balance_tol", c.mass_balance_tol},
                {"residual_bound", c.residual_bound},
                {"precondition_slack_min", c.precondition_slack_min}};
}

SolveConfig config_from_json(const json& j) {
    expect_schema(j, "solve_config");
    SolveConfig c;
    c.q = j.value("q", c.q);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        c.grid_kind = grid_kind_from_name(g.value("kind", std::string("product")));
        c.grid_resolution = g.value("resolution", c.grid_resolution);
        c.grid_seed = g.value("seed", c.grid_seed);
    }
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.gradient_tolerance = j.value("gradient_tolerance", c.gradient_tolerance);
    if (j.contains("step")) {
        const json& s = j.at("step");
        c.step.initial_step = s.value("initial", c.step.initial_step);
        c.step.backtrack = s.value("backtrack", c.step.backtrack);
        c.step.sufficient_decrease = s.value("sufficient_decrease", c.step.sufficient_decrease);
    }
    c.h_min = j.value("h_min", c.h_min);
    if (j.value("normalization", std::string("max_h_one")) != "max_h_one")
        throw Error("unknown normalization (only max_h_one is supported)");
    c.enforce_even = j.value("enforce_even", c.enforce_even);
    c.seed = j.value("seed", c.seed);
    c.restarts = j.value("restarts", c.restarts);
    c.warm_start = j.value("warm_start", c.warm_start);
    c.override_regime = j.value("override_regime", c.override_regime);
    c.mass_balance_tol = j.value("mass_balance_tol", c.mass_balance_tol);
    c.residual_bound = j.value("residual_bound", c.residual_bound);
    c.precondition_slack_min = j.value("precondition_slack_min", c.precondition_slack_min);
    return c;
}

namespace {

std::string hemisphere_status_name(HemisphereStatus s) {
    switch (s) {
        case HemisphereStatus::none: return "none";
        case HemisphereStatus::concentrated: return "concentrated";
        default: return "indeterminate";
    }
}

std::string solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        default: return "refused_preconditions";
    }
}

} // namespace

json precondition_report_to_json(const PreconditionReport& r) {
    json j{{"even", r.even},
           {"hemisphere", json{{"status", hemisphere_status_name(r.hemisphere.status)},
                               {"min_dot", r.hemisphere.min_dot},
                               {"witness", r.hemisphere.witness}}},
           {"great_subsphere_free", r.great_subsphere_free},
           {"subspace_applicable", r.subspace_applicable}};
    json rows = json::array();
    for (const SubspaceRow& row : r.subspace)
        rows.push_back(json{{"i", row.i},
                            {"sup_fraction", row.fraction},
                            {"threshold", row.threshold},
                            {"slack", row.slack},
                            {"witness", row.witness}});
    j["subspace_mass"] = rows;
    if (r.mass_balance)
        j["mass_balance"] = json{{"total", r.mass_balance->total},
                                 {"vol_Q", r.mass_balance->vol_q},
                                 {"gap", r.mass_balance->gap},
                                 {"pass", r.mass_balance->pass}};
    return j;
}

json solve_report_to_json(const SolveReport& r) {
    json starts = json::array();
    for (const StartSummary& s : r.starts)
        starts.push_back(json{{"start", s.start},
                              {"objective", s.objective},
                              {"grad_norm", s.grad_norm},
                              {"iterations", s.iterations},
                              {"converged", s.converged}});
    return json{{"schema", "solve_report"},
                {"status", solve_status_name(r.status)},
                {"scale", r.scale},
                {"iterations", r.iterations},
                {"residual", r.residual.residual},
                {"atom_errors", r.residual.atom_errors},
                {"achieved_total", r.residual.achieved_total},
                {"elongation", r.elongation},
                {"floor_hit", r.floor_hit},
                {"grid", grid_spec_to_json(r.grid)},
                {"preconditions", precondition_report_to_json(r.preconditions)},
                {"warnings", r.warnings},
                {"starts", starts}};
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
    std::string out = "iter,J,grad_norm,step\n";
    for (const TracePoint& p : trace) {
        out += std::to_string(p.iter);
        out += ',';
        out += csv_number(p.objective);
        out += ',';
        out += csv_number(p.grad_norm);
        out += ',';
        out += csv_number(p.step);
        out += '\n';
    }
    return out;
}

std::string sweep_to_csv(const SweepReport& report) {
    std::string out = "alpha,m,spread,integral,estimate,ratio\n";
    for (const SweepRow& r : report.rows) {
        out += csv_number(r.alpha);
        out += ',';
        out += std::to_string(r.m);
        out += ',';
        out += csv_number(r.spread);
        out += ',';
        out += csv_number(r.integral);
        out += ',';
        out += csv_number(r.estimate);
        out += ',';
        out += csv_number(r.ratio);
        out += '\n';
    }
    return out;
}

std::string canonical_dump(const json& j) { return j.dump(); }

std::string document_digest(const json& j) { return hex64(fnv1a64(canonical_dump(j))); }

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace minklab
