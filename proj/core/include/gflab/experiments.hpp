#pragma once
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gflab/asymptotics.hpp"
#include "gflab/distributions.hpp"
#include "gflab/family.hpp"
#include "gflab/ladder.hpp"
#include "gflab/mollifier.hpp"
#include "gflab/nonlinearity.hpp"
#include "gflab/wave.hpp"

namespace gflab {

/// Numeric profile shared by all scenarios of one run.
struct LabSettings {
    Trapezoid region{2.0, 1.5};
    EpsilonLadder ladder = make_ladder(0.25, 0.5, 6);
    int points_per_eps = 8;
    int moment_order = 2;
    double mollifier_radius = 10.0;
    int samples_per_unit = 64;
    PicardSettings picard{};
    double cell_side = 0.25;
    int max_order = 3;
    double q_max = 5.0;
    int parallelism = 1;
    unsigned seed = 0; // echoed in results; scenarios draw no randomness
};

enum class ScenarioId {
    SmoothConsistency,
    ContinuousAssociation,
    DeltaWave,
    DeltaSquared,
    ConeRegularity,
    RegularitySplitA,
    RegularitySplitB,
    NegligiblePerturbation,
    SuperpositionStability,
    MClassification,
};

std::string to_string(ScenarioId id);
ScenarioId scenario_from_name(const std::string& name);
std::vector<ScenarioId> default_suite();

struct ScenarioSpec {
    ScenarioId id = ScenarioId::SmoothConsistency;
    DistributionSpec a;
    DistributionSpec b;
    NonlinearitySpec f = NonlinearitySpec::zero();
    LabSettings lab;
    std::map<std::string, double> tolerances;

    static ScenarioSpec defaults(ScenarioId id, const LabSettings& lab);
    double tol(const std::string& key) const;
    /// Checks the scenario's hypotheses against catalog metadata; throws
    /// HypothesisError on violations.
    void validate() const;
};

/// One flattened evidence record; maps 1:1 onto a CSV row.
struct EvidenceRow {
    std::string scenario;
    std::optional<double> epsilon;
    std::string region_or_cell;
    std::string alpha;
    std::string norm_kind;
    double norm_value = 0.0;
    std::optional<double> fit_slope;
    std::optional<double> fit_r2;
    std::string verdict;
};

struct ScenarioResult {
    ScenarioId id = ScenarioId::SmoothConsistency;
    bool pass = false;
    std::vector<EvidenceRow> rows;
    std::vector<std::string> notes;
    double runtime_ms = 0.0;
    ScenarioSpec spec; // configuration echo
};

/// Generalized number M = class of (1/2) integral of s1_eps.
GeneralizedScalar compute_M(const Family1D& s1);

struct MClassification {
    enum class Kind { FiniteLimit, Diverging, Oscillating };
    Kind kind = Kind::FiniteLimit;
    std::complex<double> limit{0.0, 0.0};
    AsymptoticFit magnitude_fit;
};

MClassification classify_M(const GeneralizedScalar& M);
std::string to_string(MClassification::Kind kind);

ScenarioResult run_scenario(const ScenarioSpec& spec);

ScenarioResult run_smooth_consistency(const ScenarioSpec& spec);
ScenarioResult run_continuous_association(const ScenarioSpec& spec);
ScenarioResult run_delta_wave(const ScenarioSpec& spec);
ScenarioResult run_delta_squared(const ScenarioSpec& spec);
ScenarioResult run_cone_regularity(const ScenarioSpec& spec);
ScenarioResult run_regularity_split(const ScenarioSpec& spec, bool case_a);
ScenarioResult run_negligible_perturbation(const ScenarioSpec& spec);
ScenarioResult run_superposition_stability(const ScenarioSpec& spec);
ScenarioResult run_m_classification(const ScenarioSpec& spec);

/// Imbeds a data spec on per-rung solver-aligned grids for the region.
Family1D imbed_for_region(const DistributionSpec& d, const EpsilonLadder& ladder,
                          const Mollifier& phi, const Trapezoid& region, int points_per_eps);

} // namespace gflab
