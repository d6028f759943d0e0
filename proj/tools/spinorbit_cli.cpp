// spinorbit: command-line front end for the spin-to-OAM teleportation simulator.
//
//   spinorbit teleport --gamma G --delta D --ell L [--outcome phi-plus] [--seed S]
//   spinorbit render   [--state v ...] [--panels] [--gamma G --delta D] --ell L --out DIR
//   spinorbit holo     --ell L --pitch P --target sector-v --out FILE
//   spinorbit table1   [--noiseless] --shots N --trials T --seed S [--row label:gamma:delta ...]
//
// Exit codes: 0 success, 1 internal or I/O failure, 2 invalid configuration.
// Errors are reported on stderr as a JSON object.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinorbit/hilbert.hpp"
#include "spinorbit/optics.hpp"
#include "spinorbit/protocol.hpp"
#include "spinorbit/tomography.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace spinorbit;

constexpr double kPi = std::numbers::pi;

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double gamma = kPi;
    double delta = 0.0;
    bool gamma_set = false;
    int ell = 2;
    std::string outcome;
    std::string mode = "physical";
    std::uint64_t shots = 10000;
    int trials = 100;
    std::uint64_t seed = 0;
    std::string grid = "256x256";
    double extent = 3.0;
    double pitch = 16.0;
    std::string target = "sector-v";
    bool noiseless = false;
    bool degrees = false;
    bool raw = false;
    bool panels = false;
    std::vector<std::string> states;
    std::vector<std::string> rows;
    std::string out;
    std::string counts_out;
    std::string rho_out;
};

double to_radians(double value, bool degrees) { return degrees ? value * kPi / 180.0 : value; }

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

void validate_gamma(double gamma) {
    require(std::isfinite(gamma) && gamma >= 0.0 && gamma <= kPi, "gamma must lie in [0, pi] radians");
}

optics::GridSpec parse_grid(const RunConfig& cfg) {
    optics::GridSpec grid;
    const auto x = cfg.grid.find_first_of("xX");
    require(x != std::string::npos, "--grid must look like WIDTHxHEIGHT");
    try {
        std::size_t used_w = 0;
        std::size_t used_h = 0;
        const std::string w = cfg.grid.substr(0, x);
        const std::string h = cfg.grid.substr(x + 1);
        grid.width = std::stoi(w, &used_w);
        grid.height = std::stoi(h, &used_h);
        require(used_w == w.size() && used_h == h.size(), "--grid must look like WIDTHxHEIGHT");
    } catch (const std::logic_error&) {
        throw ValidationError("--grid must look like WIDTHxHEIGHT");
    }
    grid.extent = cfg.extent;
    require(grid.width >= 2 && grid.height >= 2, "grid must be at least 2x2 pixels");
    require(std::isfinite(grid.extent) && grid.extent > 0.0, "--extent must be > 0");
    return grid;
}

void validate_common(const RunConfig& cfg) {
    require(cfg.ell >= 1, "--ell must be >= 1");
    if (cfg.gamma_set) validate_gamma(to_radians(cfg.gamma, cfg.degrees));
    require(std::isfinite(cfg.delta), "--delta must be finite");
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + cfg.out + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + cfg.out);
}

// ---------------------------------------------------------------------------

int cmd_teleport(const RunConfig& cfg) {
    validate_common(cfg);
    require(cfg.gamma_set, "teleport needs --gamma");
    std::optional<protocol::BellLabel> forced;
    if (!cfg.outcome.empty()) {
        forced = protocol::parse_bell_label(cfg.outcome);
        require(forced.has_value(), "--outcome must be one of phi-plus, phi-minus, psi-plus, psi-minus");
    }
    require(cfg.mode == "physical" || cfg.mode == "direct", "--mode must be physical or direct");

    const protocol::InputPolarization pol(to_radians(cfg.gamma, cfg.degrees), to_radians(cfg.delta, cfg.degrees));
    const auto mode = cfg.mode == "direct" ? protocol::MeasurementMode::Direct : protocol::MeasurementMode::Physical;
    const auto result = protocol::teleport(pol, cfg.ell, forced, cfg.seed, mode);
    const auto bits = protocol::classical_bits(result.outcome);
    const auto point = optics::poincare_coords(result.b_state);

    json doc;
    doc["input"] = {{"gamma", pol.gamma()},
                    {"delta", pol.delta()},
                    {"alpha", complex_json(pol.alpha())},
                    {"beta", complex_json(pol.beta())}};
    doc["ell"] = cfg.ell;
    doc["seed"] = cfg.seed;
    doc["mode"] = cfg.mode;
    doc["outcome"] = std::string(protocol::to_string(result.outcome));
    doc["bits"] = json::array({bits.first, bits.second});
    doc["probability"] = result.probability;
    doc["b_state"] = {{"basis", json::array({"h", "v"})},
                      {"amplitudes",
                       json::array({complex_json(result.b_state.amplitudes()(0)),
                                    complex_json(result.b_state.amplitudes()(1))})}};
    doc["poincare"] = json::array({point.x, point.y, point.z});
    emit(cfg, doc.dump(2) + "\n");
    return 0;
}

std::optional<Ket> named_b_state(const std::string& name, int ell) {
    const double s = 1.0 / std::numbers::sqrt2;
    Vector amps(2);
    if (name == "plus" || name == "l") amps << s, Complex(0, s);
    else if (name == "minus" || name == "r") amps << s, Complex(0, -s);
    else if (name == "h") amps << 1, 0;
    else if (name == "v") amps << 0, 1;
    else if (name == "d") amps << s, s;
    else if (name == "a") amps << s, -s;
    else return std::nullopt;
    return Ket({oam_b(Basis::Linear)}, amps, ell);
}

int cmd_render(const RunConfig& cfg) {
    validate_common(cfg);
    const optics::GridSpec grid = parse_grid(cfg);

    struct Panel {
        std::string name;
        Ket state;
    };
    std::vector<Panel> panels;
    for (const auto& name : cfg.states) {
        auto ket = named_b_state(name, cfg.ell);
        require(ket.has_value(), "--state must be one of plus, minus, h, v, d, a, l, r");
        panels.push_back({name + "_l" + std::to_string(cfg.ell), *ket});
    }
    if (cfg.panels) {
        int index = 1;
        for (const char* input : {"L", "H", "A", "V", "D"}) {
            const auto pol = protocol::InputPolarization::named(input);
            auto result = protocol::teleport(pol, cfg.ell, protocol::BellLabel::PhiPlus);
            panels.push_back({"panel_" + std::to_string(index++) + "_" + input, result.b_state});
        }
    }
    if (panels.empty()) {
        require(cfg.gamma_set, "render needs --state, --panels or --gamma/--delta");
        const protocol::InputPolarization pol(to_radians(cfg.gamma, cfg.degrees), to_radians(cfg.delta, cfg.degrees));
        auto result = protocol::teleport(pol, cfg.ell, protocol::BellLabel::PhiPlus);
        panels.push_back({"teleported_l" + std::to_string(cfg.ell), result.b_state});
    }

    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    for (const auto& panel : panels) {
        const auto image = optics::intensity_image(panel.state, grid);
        const fs::path path = dir / (panel.name + ".pgm");
        optics::write_pgm(path, image);
        std::cout << path.string() << "\n";
        if (cfg.raw) {
            const fs::path raw = dir / (panel.name + ".raw");
            optics::write_raw(raw, image);
            std::cout << raw.string() << "\n";
        }
    }
    return 0;
}

int cmd_holo(const RunConfig& cfg) {
    validate_common(cfg);
    require(std::isfinite(cfg.pitch) && cfg.pitch >= 2.0, "--pitch must be >= 2 pixels");
    optics::HologramTarget target;
    try {
        target = optics::parse_hologram_target(cfg.target);
    } catch (const std::invalid_argument&) {
        throw ValidationError("--target must be sector-v, sector-h or blazed");
    }
    const optics::GridSpec grid = parse_grid(cfg);
    const auto image = optics::sector_hologram({cfg.ell, cfg.pitch, target}, grid);
    const fs::path path = cfg.out.empty() ? fs::path("hologram.pgm") : fs::path(cfg.out);
    optics::write_pgm(path, image);
    std::cout << path.string() << "\n";
    if (cfg.raw) {
        fs::path raw = path;
        raw.replace_extension(".raw");
        optics::write_raw(raw, image);
        std::cout << raw.string() << "\n";
    }
    return 0;
}

tomography::InputRow parse_row(const std::string& text, bool degrees) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    require(parts.size() == 3 && !parts[0].empty(), "--row must look like label:gamma:delta");
    double gamma = 0.0;
    double delta = 0.0;
    try {
        gamma = to_radians(std::stod(parts[1]), degrees);
        delta = to_radians(std::stod(parts[2]), degrees);
    } catch (const std::logic_error&) {
        throw ValidationError("--row must look like label:gamma:delta");
    }
    validate_gamma(gamma);
    require(std::isfinite(delta), "--row delta must be finite");
    return {parts[0], gamma, delta};
}

int cmd_table1(const RunConfig& cfg) {
    validate_common(cfg);
    require(cfg.shots >= 1, "--shots must be >= 1");
    require(cfg.trials >= 1, "--trials must be >= 1");

    auto rows = tomography::mub_input_rows();
    for (const auto& text : cfg.rows) rows.push_back(parse_row(text, cfg.degrees));

    tomography::ReportOptions options;
    options.ell = cfg.ell;
    options.shots = cfg.shots;
    options.trials = cfg.trials;
    options.seed = cfg.seed;
    options.noiseless = cfg.noiseless;
    const auto reports = tomography::tomography_report(rows, options);

    std::ostringstream csv;
    tomography::write_report_csv(csv, reports);
    emit(cfg, csv.str());

    if (!cfg.counts_out.empty()) {
        std::ofstream out(cfg.counts_out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + cfg.counts_out + " for writing");
        tomography::write_counts_csv(out, reports);
    }
    if (!cfg.rho_out.empty()) {
        json doc = json::object();
        for (const auto& r : reports) doc[r.input.label] = tomography::density_matrix_json(r.reconstructed);
        std::ofstream out(cfg.rho_out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + cfg.rho_out + " for writing");
        out << doc.dump(2) << "\n";
    }

    double grand = 0.0;
    double worst = 1.0;
    for (const auto& r : reports) {
        grand += r.fidelity_mean;
        worst = std::min(worst, r.fidelity_mean);
    }
    grand /= static_cast<double>(reports.size());
    std::cerr << std::fixed << std::setprecision(6) << "rows=" << reports.size() << " mean_F=" << grand
              << " min_F=" << worst << "\n";
    return 0;
}

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-to-orbital-angular-momentum teleportation simulator"};
    app.require_subcommand(1);
    RunConfig cfg;

    const auto add_angles = [&](CLI::App* sub) {
        sub->add_option("--gamma", cfg.gamma, "polar angle of the input polarization (radians)")
            ->each([&](const std::string&) { cfg.gamma_set = true; });
        sub->add_option("--delta", cfg.delta, "azimuth of the input polarization (radians)");
        sub->add_flag("--degrees", cfg.degrees, "interpret angles in degrees");
    };
    const auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid", cfg.grid, "image size WIDTHxHEIGHT")->capture_default_str();
        sub->add_option("--extent", cfg.extent, "frame half-width in beam waists")->capture_default_str();
        sub->add_flag("--raw", cfg.raw, "also write little-endian float64 dumps");
    };

    auto* teleport = app.add_subcommand("teleport", "run the protocol once and print the result as JSON");
    add_angles(teleport);
    teleport->add_option("--ell", cfg.ell, "OAM subspace |l|")->capture_default_str();
    teleport->add_option("--outcome", cfg.outcome, "force a Bell outcome (phi-plus, phi-minus, psi-plus, psi-minus)");
    teleport->add_option("--seed", cfg.seed, "seed for outcome sampling")->capture_default_str();
    teleport->add_option("--mode", cfg.mode, "Bell analysis: physical or direct")->capture_default_str();
    teleport->add_option("--out", cfg.out, "write JSON here instead of stdout");

    auto* render = app.add_subcommand("render", "write far-field intensity images of photon B as PGM");
    add_angles(render);
    add_grid(render);
    render->add_option("--ell", cfg.ell, "OAM subspace |l|")->capture_default_str();
    render->add_option("--state", cfg.states, "plus, minus, h, v, d, a, l or r (repeatable)");
    render->add_flag("--panels", cfg.panels, "teleported panels for inputs L, H, A, V, D");
    render->add_option("--out", cfg.out, "output directory")->capture_default_str();

    auto* holo = app.add_subcommand("holo", "write an SLM hologram as PGM");
    add_grid(holo);
    holo->add_option("--ell", cfg.ell, "OAM subspace |l|")->capture_default_str();
    holo->add_option("--pitch", cfg.pitch, "grating period in pixels")->capture_default_str();
    holo->add_option("--target", cfg.target, "sector-v, sector-h or blazed")->capture_default_str();
    holo->add_option("--out", cfg.out, "output PGM path");

    auto* table1 = app.add_subcommand("table1", "tomography fidelities of teleported states as CSV");
    table1->add_option("--ell", cfg.ell, "OAM subspace |l|")->capture_default_str();
    table1->add_option("--shots", cfg.shots, "mean counts per projector")->capture_default_str();
    table1->add_option("--trials", cfg.trials, "repetitions per row")->capture_default_str();
    table1->add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    table1->add_flag("--noiseless", cfg.noiseless, "use exact expected counts");
    table1->add_flag("--degrees", cfg.degrees, "interpret --row angles in degrees");
    table1->add_option("--row", cfg.rows, "extra input label:gamma:delta (repeatable)");
    table1->add_option("--out", cfg.out, "write CSV here instead of stdout");
    table1->add_option("--counts", cfg.counts_out, "write first-trial counts CSV");
    table1->add_option("--rho", cfg.rho_out, "write first-trial density matrices as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("validation", e.what());
        return 2;
    }

    // table1 defaults to seed 1 when none is given.
    if (table1->parsed() && table1->count("--seed") == 0) cfg.seed = 1;
    try {
        if (teleport->parsed()) return cmd_teleport(cfg);
        if (render->parsed()) return cmd_render(cfg);
        if (holo->parsed()) return cmd_holo(cfg);
        if (table1->parsed()) return cmd_table1(cfg);
    } catch (const ValidationError& e) {
        print_error("validation", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 1;
}
