#include "rice/negotiation.h"

#include <algorithm>
#include <string>
#include <tuple>

namespace rice {

Protocol::Protocol(std::size_t num_regions, int num_levels)
    : num_regions_(num_regions), num_levels_(num_levels) {}

void Protocol::begin_step(int step, Rng&) { step_ = step; }

StageSchema Protocol::schema(int stage, int) const {
    check_stage(stage);
    return {};
}

NegotiationObservation Protocol::observe(int stage, int region) const {
    check_stage(stage);
    NegotiationObservation obs;
    obs.step = step_;
    obs.stage = stage;
    obs.region = region;
    return obs;
}

void Protocol::submit(int stage, const std::vector<NegotiationAction>&) { check_stage(stage); }

AgreementState Protocol::resolve() const { return empty_agreement(); }

void Protocol::apply_overrides(std::vector<ActionSet>&) const {}

void Protocol::check_stage(int stage) const {
    if (stage < 0 || stage >= num_stages()) {
        throw ProtocolError(name() + ": stage " + std::to_string(stage) + " out of range");
    }
}

AgreementState Protocol::empty_agreement() const {
    AgreementState a;
    a.min_mitigation_level.assign(num_regions_, 0);
    return a;
}

namespace {

void check_action_shape(const std::string& protocol, int stage, std::size_t region,
                        const NegotiationAction& action, const StageSchema& schema) {
    if (action.choices.size() != schema.head_sizes.size()) {
        throw ProtocolError(protocol + ": stage " + std::to_string(stage) + " region " +
                            std::to_string(region) + " submitted " +
                            std::to_string(action.choices.size()) + " choices, expected " +
                            std::to_string(schema.head_sizes.size()));
    }
    for (std::size_t h = 0; h < action.choices.size(); ++h) {
        if (action.choices[h] < 0 || action.choices[h] >= schema.head_sizes[h]) {
            throw ProtocolError(protocol + ": stage " + std::to_string(stage) + " region " +
                                std::to_string(region) + " head " + std::to_string(h) +
                                " choice out of range");
        }
    }
}

class NoNegotiation final : public Protocol {
  public:
    using Protocol::Protocol;
    std::string name() const override { return "none"; }
    int num_stages() const override { return 0; }
};

class Unilateral final : public Protocol {
  public:
    Unilateral(std::size_t n, int levels, double alpha) : Protocol(n, levels), alpha_(alpha) {}
    std::string name() const override { return "unilateral"; }
    int num_stages() const override { return 0; }

    void apply_overrides(std::vector<ActionSet>& actions) const override {
        std::vector<double> mu(actions.size());
        for (std::size_t i = 0; i < actions.size(); ++i) mu[i] = actions[i].mitigation;
        const auto overrides = unilateral_tariff_rule(mu, alpha_);
        for (std::size_t a = 0; a < actions.size(); ++a)
            for (std::size_t b = 0; b < actions.size(); ++b)
                if (overrides[a][b]) actions[a].tariffs[b] = *overrides[a][b];
    }

  private:
    double alpha_;
};

class Bilateral final : public Protocol {
  public:
    Bilateral(std::size_t n, int levels) : Protocol(n, levels) {
        if (n < 2) throw ProtocolError("bilateral protocol needs at least 2 regions");
    }
    std::string name() const override { return "bilateral"; }
    int num_stages() const override { return 2; }

    void begin_step(int step, Rng& rng) override {
        Protocol::begin_step(step, rng);
        proposals_.clear();
        decisions_.clear();
    }

    StageSchema schema(int stage, int) const override {
        check_stage(stage);
        const int others = static_cast<int>(num_regions_) - 1;
        if (stage == 0) return {StageKind::BilateralProposal, std::vector<int>(2 * others, num_levels_)};
        return {StageKind::BilateralEvaluation, std::vector<int>(others, 2)};
    }

    NegotiationObservation observe(int stage, int region) const override {
        auto obs = Protocol::observe(stage, region);
        for (const auto& p : proposals_) {
            if (p.recipient == region) obs.incoming.push_back(p);
            if (p.proposer == region) obs.outgoing.push_back(p);
        }
        return obs;
    }

    void submit(int stage, const std::vector<NegotiationAction>& actions) override {
        check_stage(stage);
        if (actions.size() != num_regions_) {
            throw ProtocolError("bilateral: expected " + std::to_string(num_regions_) +
                                " actions, got " + std::to_string(actions.size()));
        }
        for (std::size_t r = 0; r < num_regions_; ++r)
            check_action_shape(name(), stage, r, actions[r], schema(stage, static_cast<int>(r)));

        if (stage == 0) {
            proposals_.clear();
            for (std::size_t i = 0; i < num_regions_; ++i) {
                std::size_t h = 0;
                for (std::size_t j = 0; j < num_regions_; ++j) {
                    if (j == i) continue;
                    proposals_.push_back(Proposal{static_cast<int>(i), static_cast<int>(j),
                                                  actions[i].choices[h], actions[i].choices[h + 1]});
                    h += 2;
                }
            }
            decisions_.assign(proposals_.size(), false);
            return;
        }
        if (proposals_.size() != num_regions_ * (num_regions_ - 1)) {
            throw ProtocolError("bilateral: evaluation submitted before proposals");
        }
        // proposals_ is in (proposer, recipient) order; recipient r reads its
        // incoming proposals in ascending proposer order.
        for (std::size_t k = 0; k < proposals_.size(); ++k) {
            const auto& p = proposals_[k];
            const auto r = static_cast<std::size_t>(p.recipient);
            const std::size_t head = static_cast<std::size_t>(p.proposer) -
                                     (static_cast<std::size_t>(p.proposer) > r ? 1 : 0);
            decisions_[k] = actions[r].choices[head] == 1;
        }
    }

    AgreementState resolve() const override {
        if (proposals_.empty()) return empty_agreement();
        return resolve_bilateral(num_regions_, proposals_, decisions_);
    }

  private:
    std::vector<Proposal> proposals_;
    std::vector<bool> decisions_;
};

class ClimateClub final : public Protocol {
  public:
    ClimateClub(std::size_t n, int levels, ProposerSelector selector)
        : Protocol(n, levels), selector_(std::move(selector)) {
        if (n < 2) throw ProtocolError("climate club protocol needs at least 2 regions");
        if (!selector_) {
            selector_ = [](std::size_t count, Rng& rng) {
                return static_cast<int>(rng.uniform_index(count));
            };
        }
    }
    std::string name() const override { return "club"; }
    int num_stages() const override { return 2; }

    void begin_step(int step, Rng& rng) override {
        Protocol::begin_step(step, rng);
        proposer_ = selector_(num_regions_, rng);
        if (proposer_ < 0 || static_cast<std::size_t>(proposer_) >= num_regions_) {
            throw ProtocolError("club: proposer selector returned " + std::to_string(proposer_));
        }
        offer_.reset();
        joined_.assign(num_regions_, false);
        evaluated_ = false;
    }

    StageSchema schema(int stage, int region) const override {
        check_stage(stage);
        const bool is_proposer = region == proposer_;
        if (stage == 0) {
            return {StageKind::ClubProposal,
                    is_proposer ? std::vector<int>{num_levels_, num_levels_} : std::vector<int>{}};
        }
        return {StageKind::ClubEvaluation, is_proposer ? std::vector<int>{} : std::vector<int>{2}};
    }

    NegotiationObservation observe(int stage, int region) const override {
        auto obs = Protocol::observe(stage, region);
        if (offer_) obs.club_offer = offer_;
        return obs;
    }

    void submit(int stage, const std::vector<NegotiationAction>& actions) override {
        check_stage(stage);
        if (actions.size() != num_regions_) {
            throw ProtocolError("club: expected " + std::to_string(num_regions_) + " actions, got " +
                                std::to_string(actions.size()));
        }
        for (std::size_t r = 0; r < num_regions_; ++r)
            check_action_shape(name(), stage, r, actions[r], schema(stage, static_cast<int>(r)));
        if (stage == 0) {
            const auto& a = actions[static_cast<std::size_t>(proposer_)];
            offer_ = ClubTerms{proposer_, a.choices[0], a.choices[1], {}};
            return;
        }
        if (!offer_) throw ProtocolError("club: evaluation submitted before the proposal");
        for (std::size_t r = 0; r < num_regions_; ++r)
            joined_[r] = static_cast<int>(r) != proposer_ && actions[r].choices[0] == 1;
        evaluated_ = true;
    }

    AgreementState resolve() const override {
        auto a = empty_agreement();
        if (!offer_ || !evaluated_) return a;
        ClubTerms terms = *offer_;
        terms.members.assign(num_regions_, false);
        // The proposer is bound by its own proposal.
        terms.members[static_cast<std::size_t>(proposer_)] = true;
        for (std::size_t r = 0; r < num_regions_; ++r)
            if (joined_[r]) terms.members[r] = true;
        for (std::size_t r = 0; r < num_regions_; ++r)
            if (terms.members[r]) a.min_mitigation_level[r] = terms.mu_min_level;
        a.club = std::move(terms);
        return a;
    }

  private:
    ProposerSelector selector_;
    int proposer_ = 0;
    std::optional<ClubTerms> offer_;
    std::vector<bool> joined_;
    bool evaluated_ = false;
};

}  // namespace

std::unique_ptr<Protocol> no_negotiation(std::size_t num_regions, int num_levels) {
    return std::make_unique<NoNegotiation>(num_regions, num_levels);
}

std::vector<std::vector<std::optional<double>>> unilateral_tariff_rule(const std::vector<double>& mu,
                                                                       double alpha_coef) {
    const std::size_t n = mu.size();
    std::vector<std::vector<std::optional<double>>> out(n, std::vector<std::optional<double>>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && mu[a] > mu[b]) out[a][b] = std::clamp(alpha_coef * (mu[a] - mu[b]), 0.0, 1.0);
    return out;
}

std::unique_ptr<Protocol> unilateral_protocol(std::size_t num_regions, int num_levels,
                                              double alpha_coef) {
    if (alpha_coef < 0.0) throw ProtocolError("unilateral: alpha_coef must be >= 0");
    return std::make_unique<Unilateral>(num_regions, num_levels, alpha_coef);
}

std::unique_ptr<Protocol> bilateral_protocol(std::size_t num_regions, int num_levels) {
    return std::make_unique<Bilateral>(num_regions, num_levels);
}

std::unique_ptr<Protocol> climate_club_protocol(std::size_t num_regions, int num_levels,
                                                ProposerSelector selector) {
    return std::make_unique<ClimateClub>(num_regions, num_levels, std::move(selector));
}

AgreementState resolve_bilateral(std::size_t num_regions, const std::vector<Proposal>& proposals,
                                 const std::vector<bool>& accepted) {
    if (proposals.size() != accepted.size()) {
        throw ProtocolError("resolve_bilateral: " + std::to_string(proposals.size()) +
                            " proposals but " + std::to_string(accepted.size()) + " decisions");
    }
    AgreementState a;
    a.min_mitigation_level.assign(num_regions, 0);
    std::vector<std::size_t> order(proposals.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& p = proposals[x];
        const auto& q = proposals[y];
        return std::tie(p.proposer, p.recipient) < std::tie(q.proposer, q.recipient);
    });
    for (std::size_t k : order) {
        if (!accepted[k]) continue;
        const auto& p = proposals[k];
        if (p.proposer == p.recipient) throw ProtocolError("resolve_bilateral: self proposal");
        auto& mi = a.min_mitigation_level.at(static_cast<std::size_t>(p.proposer));
        auto& mj = a.min_mitigation_level.at(static_cast<std::size_t>(p.recipient));
        mi = std::max(mi, p.proposer_level);
        mj = std::max(mj, p.recipient_level);
        a.accepted.push_back(p);
    }
    return a;
}

std::vector<bool> min_rate_mask(double min_rate, int num_levels) {
    std::vector<bool> mask(static_cast<std::size_t>(num_levels));
    bool any = false;
    for (int k = 0; k < num_levels; ++k) {
        mask[static_cast<std::size_t>(k)] = level_to_rate(k, num_levels) >= min_rate - 1e-12;
        any = any || mask[static_cast<std::size_t>(k)];
    }
    if (!any) throw ProtocolError("empty mask: minimum rate " + std::to_string(min_rate) + " exceeds 1");
    return mask;
}

std::vector<ActionMask> build_masks(const AgreementState& agreements, std::size_t num_regions,
                                    int num_levels) {
    std::vector<ActionMask> masks(num_regions, ActionMask::all_allowed(num_regions, num_levels));
    for (std::size_t r = 0; r < num_regions; ++r) {
        const int level = r < agreements.min_mitigation_level.size() ? agreements.min_mitigation_level[r] : 0;
        if (level >= num_levels) {
            throw ProtocolError("empty mitigation mask for region " + std::to_string(r) +
                                ": minimum level " + std::to_string(level) + " >= " +
                                std::to_string(num_levels));
        }
        masks[r].mitigation = min_rate_mask(level_to_rate(std::max(level, 0), num_levels), num_levels);
    }
    if (agreements.club) {
        const auto& club = *agreements.club;
        if (club.tau_min_level >= num_levels) throw ProtocolError("empty tariff mask: tau_min level too large");
        const auto tariff_mask = min_rate_mask(level_to_rate(club.tau_min_level, num_levels), num_levels);
        for (std::size_t a = 0; a < num_regions; ++a) {
            if (!club.members[a]) continue;
            for (std::size_t b = 0; b < num_regions; ++b)
                if (b != a && !club.members[b]) masks[a].tariffs[b] = tariff_mask;
        }
    }
    return masks;
}

ProtocolKind parse_protocol_kind(const std::string& name) {
    if (name == "none") return ProtocolKind::None;
    if (name == "unilateral") return ProtocolKind::Unilateral;
    if (name == "bilateral") return ProtocolKind::Bilateral;
    if (name == "club") return ProtocolKind::Club;
    throw ConfigError("unknown protocol '" + name + "' (expected none|unilateral|bilateral|club)");
}

std::string to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::None: return "none";
        case ProtocolKind::Unilateral: return "unilateral";
        case ProtocolKind::Bilateral: return "bilateral";
        case ProtocolKind::Club: return "club";
    }
    return "none";
}

std::unique_ptr<Protocol> make_protocol(const ProtocolSpec& spec, std::size_t num_regions,
                                        int num_levels) {
    switch (spec.kind) {
        case ProtocolKind::None: return no_negotiation(num_regions, num_levels);
        case ProtocolKind::Unilateral: return unilateral_protocol(num_regions, num_levels, spec.alpha_coef);
        case ProtocolKind::Bilateral: return bilateral_protocol(num_regions, num_levels);
        case ProtocolKind::Club: return climate_club_protocol(num_regions, num_levels);
    }
    throw ProtocolError("unknown protocol kind");
}

}  // namespace rice
