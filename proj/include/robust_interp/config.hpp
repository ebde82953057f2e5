#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robust_interp/quadrature.hpp"
#include "robust_interp/synthesis.hpp"
#include "robust_interp/uncertainty.hpp"

namespace robust_interp {

inline constexpr std::string_view kToolName = "robust-interp";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct CoefficientPair {
    std::vector<double> num;
    std::vector<double> den;
    bool operator==(const CoefficientPair&) const = default;
    [[nodiscard]] RationalFunction build() const { return {Polynomial(num), Polynomial(den)}; }
};

// Tagged family description as it appears in the config document.
struct FamilySpec {
    std::string type;  // gain_phase_delay_box | uncertain_zero | uncertain_pole | composite | sampled
    double k = 1.0;
    double phi_max = 0.0;
    double t_max = 0.0;
    double z = 1.0;  // uncertain_zero
    double q = 1.0;  // uncertain_pole
    double a = 1.0;
    double b = 1.0;
    std::vector<FamilySpec> members;       // composite
    std::vector<CoefficientPair> samples;  // sampled
    std::optional<int> grid_points;        // composite brute-force resolution

    bool operator==(const FamilySpec&) const = default;
    [[nodiscard]] DisturbanceFamily build() const;
};

struct WeightFitSpec {
    int degree = 4;
    std::optional<int> rel_deg_offset;
    double overshoot_cap = 1.0;
    bool operator==(const WeightFitSpec&) const = default;
};

struct SynthesisSpec {
    std::optional<double> epsilon;
    std::optional<CoefficientPair> t0;  // empty means T0 = 0
    WeightFitSpec weight_fit;
    double pick_margin = 1e-10;
    bool operator==(const SynthesisSpec&) const = default;
};

struct OutputSpec {
    std::string report_path = "report.json";
    std::string controller_path = "controller.json";
    std::string nyquist_csv_path = "nyquist.csv";
    std::string regions_csv_path = "regions.csv";
    std::vector<double> region_frequencies;
    bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
    CoefficientPair plant;
    FamilySpec uncertainty;
    SynthesisSpec synthesis;
    QuadratureConfig quadrature;
    FrequencyGridSpec grids;
    OutputSpec outputs;
    bool operator==(const RunConfig&) const = default;

    [[nodiscard]] SynthesisProblem problem() const;
};

// Parses and validates a config document. Errors are InvalidConfig with a
// "<source>:<line>[:<col>]: " prefix pointing at the offending token or key.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::string& path);

// Canonical JSON form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

// Controller document {"num": [...], "den": [...]}.
CoefficientPair parse_controller(std::string_view text, std::string_view source = "<controller>");
std::string emit_controller(const RationalFunction& k);

// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace robust_interp
