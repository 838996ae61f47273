#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rice/rng.h"
#include "rice/types.h"

namespace rice {

class ProtocolError : public ModelError {
  public:
    using ModelError::ModelError;
};

/// Offer from `proposer` to `recipient`: proposer promises mitigation of at
/// least proposer_level, recipient of at least recipient_level (grid levels).
struct Proposal {
    int proposer = 0;
    int recipient = 0;
    int proposer_level = 0;
    int recipient_level = 0;
    bool operator==(const Proposal&) const = default;
};

struct ClubTerms {
    int proposer = 0;
    int mu_min_level = 0;
    int tau_min_level = 0;
    std::vector<bool> members;  // proposer always included
    bool operator==(const ClubTerms&) const = default;
};

struct AgreementState {
    std::vector<int> min_mitigation_level;  // per region
    std::vector<Proposal> accepted;         // ledger, in (proposer, recipient) order
    std::optional<ClubTerms> club;
    bool operator==(const AgreementState&) const = default;
};

enum class StageKind { BilateralProposal, BilateralEvaluation, ClubProposal, ClubEvaluation };

/// Discrete heads a region must fill in one negotiation stage.
///  - BilateralProposal: for each other region j ascending, two heads
///    (own promised level, j's promised level), each of num_levels choices.
///  - BilateralEvaluation: for each other region j ascending, one accept head {0,1}
///    for j's proposal.
///  - ClubProposal: proposer only, heads (mu_min level, tau_min level).
///  - ClubEvaluation: non-proposers only, one join head {0,1}.
struct StageSchema {
    StageKind kind;
    std::vector<int> head_sizes;
};

struct NegotiationAction {
    std::vector<int> choices;
    bool operator==(const NegotiationAction&) const = default;
};

struct NegotiationObservation {
    int step = 0;
    int stage = 0;
    int region = 0;
    std::vector<Proposal> incoming;
    std::vector<Proposal> outgoing;
    std::optional<ClubTerms> club_offer;  // proposer, mu_min, tau_min; members empty until resolved
};

/// A negotiation protocol: a fixed number of sub-stages per step, each
/// collecting one NegotiationAction per region, followed by a resolver that
/// turns the collected actions into an AgreementState.
class Protocol {
  public:
    Protocol(std::size_t num_regions, int num_levels);
    virtual ~Protocol() = default;

    virtual std::string name() const = 0;
    virtual int num_stages() const = 0;
    /// Clears per-step state.
    virtual void begin_step(int step, Rng& protocol_rng);
    virtual StageSchema schema(int stage, int region) const;
    virtual NegotiationObservation observe(int stage, int region) const;
    /// Actions indexed by region. Throws ProtocolError on malformed input.
    virtual void submit(int stage, const std::vector<NegotiationAction>& actions);
    virtual AgreementState resolve() const;
    /// Post-decision adjustments to activity actions (e.g. rule-based tariffs).
    virtual void apply_overrides(std::vector<ActionSet>& actions) const;

    std::size_t num_regions() const { return num_regions_; }
    int num_levels() const { return num_levels_; }

  protected:
    void check_stage(int stage) const;
    AgreementState empty_agreement() const;

    std::size_t num_regions_;
    int num_levels_;
    int step_ = 0;
};

/// Zero sub-stages, no constraints.
std::unique_ptr<Protocol> no_negotiation(std::size_t num_regions, int num_levels);

/// tau_{a,b} = clamp(alpha (mu_a - mu_b), 0, 1) for every pair with mu_a > mu_b.
/// Returns an n x n matrix of overrides; entries without an override are nullopt.
std::vector<std::vector<std::optional<double>>> unilateral_tariff_rule(const std::vector<double>& mu,
                                                                       double alpha_coef);

std::unique_ptr<Protocol> unilateral_protocol(std::size_t num_regions, int num_levels,
                                              double alpha_coef);

std::unique_ptr<Protocol> bilateral_protocol(std::size_t num_regions, int num_levels);

/// Picks the club proposer for a step.
using ProposerSelector = std::function<int(std::size_t num_regions, Rng& rng)>;

std::unique_ptr<Protocol> climate_club_protocol(std::size_t num_regions, int num_levels,
                                                ProposerSelector selector = {});

/// Bilateral resolver: each region's minimum is the max promised level over
/// every accepted proposal it is party to. `proposals` and `accepted` are
/// parallel arrays.
AgreementState resolve_bilateral(std::size_t num_regions, const std::vector<Proposal>& proposals,
                                 const std::vector<bool>& accepted);

/// Boolean mask over mitigation levels allowing k iff k/(levels-1) >= min_rate - 1e-12.
/// Throws ProtocolError when no level survives.
std::vector<bool> min_rate_mask(double min_rate, int num_levels);

/// Masks implied by an agreement. Throws ProtocolError if any head ends up empty.
std::vector<ActionMask> build_masks(const AgreementState& agreements, std::size_t num_regions,
                                    int num_levels);

enum class ProtocolKind { None, Unilateral, Bilateral, Club };

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::None;
    double alpha_coef = 1.0;  // unilateral mitigation correction
    bool binding = true;      // false: masks are not enforced, compliance is recorded instead
};

ProtocolKind parse_protocol_kind(const std::string& name);
std::string to_string(ProtocolKind kind);

std::unique_ptr<Protocol> make_protocol(const ProtocolSpec& spec, std::size_t num_regions,
                                        int num_levels);

}  // namespace rice
