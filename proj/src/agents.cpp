#include "rice/agents.h"

#include <charconv>
#include <cstdlib>
#include <sstream>
#include <tuple>

namespace rice {

std::vector<double> Observation::to_vector() const {
    std::vector<double> v;
    v.push_back(step);
    v.insert(v.end(), {climate.t_at, climate.t_lo, climate.m_at, climate.m_up, climate.m_lo});
    v.insert(v.end(), {own.capital, own.labor, own.tfp, own.sigma, own.balance});
    for (const auto& r : regions) v.insert(v.end(), {r.labor, r.tfp, r.capital, r.sigma});
    const auto proposal_block = [&](const std::vector<Proposal>& props, bool incoming_side) {
        for (std::size_t j = 0; j < regions.size(); ++j) {
            if (static_cast<int>(j) == region) continue;
            double own_level = -1.0;
            double other_level = -1.0;
            for (const auto& p : props) {
                const int partner = incoming_side ? p.proposer : p.recipient;
                if (partner != static_cast<int>(j)) continue;
                own_level = incoming_side ? p.recipient_level : p.proposer_level;
                other_level = incoming_side ? p.proposer_level : p.recipient_level;
            }
            v.insert(v.end(), {own_level, other_level});
        }
    };
    proposal_block(incoming, true);
    proposal_block(outgoing, false);
    for (std::size_t r = 0; r < regions.size(); ++r)
        v.push_back(r < agreed_min_level.size() ? agreed_min_level[r] : 0);
    for (std::size_t r = 0; r < regions.size(); ++r)
        v.push_back(r < compliant.size() && compliant[r] ? 1.0 : 0.0);
    return v;
}

int Policy::comply(int wanted, const std::vector<bool>& allowed) {
    const int n = static_cast<int>(allowed.size());
    if (wanted >= 0 && wanted < n && allowed[static_cast<std::size_t>(wanted)]) return wanted;
    ++mask_substitutions_;
    for (int d = 1; d < n; ++d) {
        if (wanted + d < n && wanted + d >= 0 && allowed[static_cast<std::size_t>(wanted + d)]) return wanted + d;
        if (wanted - d >= 0 && wanted - d < n && allowed[static_cast<std::size_t>(wanted - d)]) return wanted - d;
    }
    throw ProtocolError("policy: mask allows no level");
}

namespace {

int grid_level(double rate, int num_levels, const char* field) {
    const auto level = rate_to_level(rate, num_levels);
    if (!level) {
        std::ostringstream msg;
        msg << "policy template field '" << field << "' = " << rate << " is not on the "
            << num_levels << "-level action grid";
        throw ConfigError(msg.str());
    }
    return *level;
}

struct TemplateLevels {
    int savings, mitigation, export_limit, tariff, import_bid;
    int propose_own, propose_other, club_mu, club_tau;
    bool accept, join;
};

TemplateLevels to_levels(const ActionTemplate& a, int levels) {
    return {grid_level(a.savings, levels, "savings"),
            grid_level(a.mitigation, levels, "mitigation"),
            grid_level(a.export_limit, levels, "export_limit"),
            grid_level(a.tariff, levels, "tariff"),
            grid_level(a.import_bid, levels, "import_bid"),
            grid_level(a.propose_own, levels, "propose_own"),
            grid_level(a.propose_other, levels, "propose_other"),
            grid_level(a.club_mu_min, levels, "club_mu_min"),
            grid_level(a.club_tau_min, levels, "club_tau_min"),
            a.accept_proposals,
            a.join_club};
}

class ConstantPolicy : public Policy {
  public:
    ConstantPolicy(const ActionTemplate& action, std::size_t region, std::size_t num_regions, int levels)
        : levels_(to_levels(action, levels)), region_(region), num_regions_(num_regions), num_levels_(levels) {}

    NegotiationAction negotiate(const NegotiationObservation&, const StageSchema& schema, Rng&) override {
        NegotiationAction a;
        switch (schema.kind) {
            case StageKind::BilateralProposal:
                for (std::size_t h = 0; h + 1 < schema.head_sizes.size(); h += 2) {
                    a.choices.push_back(levels_.propose_own);
                    a.choices.push_back(levels_.propose_other);
                }
                break;
            case StageKind::BilateralEvaluation:
                a.choices.assign(schema.head_sizes.size(), levels_.accept ? 1 : 0);
                break;
            case StageKind::ClubProposal:
                if (!schema.head_sizes.empty()) a.choices = {levels_.club_mu, levels_.club_tau};
                break;
            case StageKind::ClubEvaluation:
                a.choices.assign(schema.head_sizes.size(), levels_.join ? 1 : 0);
                break;
        }
        return a;
    }

    ActionSet act(const Observation&, const ActionMask& mask, Rng&) override {
        ActionSet a;
        a.savings = level_to_rate(comply(levels_.savings, mask.savings), num_levels_);
        a.mitigation = level_to_rate(comply(levels_.mitigation, mask.mitigation), num_levels_);
        a.export_limit = level_to_rate(comply(levels_.export_limit, mask.export_limit), num_levels_);
        a.tariffs.assign(num_regions_, 0.0);
        a.import_bids.assign(num_regions_, 0.0);
        for (std::size_t j = 0; j < num_regions_; ++j) {
            if (j == region_) continue;
            a.tariffs[j] = level_to_rate(comply(levels_.tariff, mask.tariffs[j]), num_levels_);
            a.import_bids[j] = level_to_rate(comply(levels_.import_bid, mask.import_bids[j]), num_levels_);
        }
        return a;
    }

  private:
    TemplateLevels levels_;
    std::size_t region_;
    std::size_t num_regions_;
    int num_levels_;
};

class RandomPolicy : public Policy {
  public:
    RandomPolicy(std::optional<std::uint64_t> seed, std::size_t region, std::size_t num_regions, int levels)
        : seed_(seed), region_(region), num_regions_(num_regions), num_levels_(levels) {}

    void reset(std::uint64_t episode_seed) override {
        if (seed_) own_.emplace(splitmix64(*seed_) ^ EpisodeRng::stream_seed(episode_seed, region_ + 1));
    }

    NegotiationAction negotiate(const NegotiationObservation&, const StageSchema& schema, Rng& rng) override {
        Rng& r = stream(rng);
        NegotiationAction a;
        for (int size : schema.head_sizes) a.choices.push_back(static_cast<int>(r.uniform_index(size)));
        return a;
    }

    ActionSet act(const Observation&, const ActionMask& mask, Rng& rng) override {
        Rng& r = stream(rng);
        ActionSet a;
        a.savings = draw(mask.savings, r);
        a.mitigation = draw(mask.mitigation, r);
        a.export_limit = draw(mask.export_limit, r);
        a.tariffs.assign(num_regions_, 0.0);
        a.import_bids.assign(num_regions_, 0.0);
        for (std::size_t j = 0; j < num_regions_; ++j) {
            if (j == region_) continue;
            a.tariffs[j] = draw(mask.tariffs[j], r);
            a.import_bids[j] = draw(mask.import_bids[j], r);
        }
        return a;
    }

  private:
    Rng& stream(Rng& episode_stream) { return own_ ? *own_ : episode_stream; }

    double draw(const std::vector<bool>& allowed, Rng& r) const {
        std::vector<int> levels;
        for (std::size_t k = 0; k < allowed.size(); ++k)
            if (allowed[k]) levels.push_back(static_cast<int>(k));
        if (levels.empty()) throw ProtocolError("random policy: mask allows no level");
        return level_to_rate(levels[r.uniform_index(levels.size())], num_levels_);
    }

    std::optional<std::uint64_t> seed_;
    std::optional<Rng> own_;
    std::size_t region_;
    std::size_t num_regions_;
    int num_levels_;
};

double parse_number(const std::string& text, const std::string& context) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError("bad number '" + text + "' in " + context);
    return v;
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& context) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw ConfigError("expected a/b in " + context + ", got '" + text + "'");
    return {parse_number(text.substr(0, slash), context), parse_number(text.substr(slash + 1), context)};
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::unique_ptr<Policy> extremal_policy(int mitigation_level, int savings_level, std::size_t num_regions,
                                        int num_levels) {
    if (mitigation_level != 0 && mitigation_level != num_levels - 1) {
        throw ConfigError("extremal policy mitigation level must be 0 or num_levels - 1");
    }
    ActionTemplate t;
    t.mitigation = level_to_rate(mitigation_level, num_levels);
    t.savings = level_to_rate(savings_level, num_levels);
    // Region index only matters for the self entries, which stay zero anyway.
    return std::make_unique<ConstantPolicy>(t, num_regions, num_regions, num_levels);
}

std::unique_ptr<Policy> constant_policy(const ActionTemplate& action, std::size_t region,
                                        std::size_t num_regions, int num_levels) {
    return std::make_unique<ConstantPolicy>(action, region, num_regions, num_levels);
}

std::unique_ptr<Policy> random_policy(std::optional<std::uint64_t> seed, std::size_t region,
                                      std::size_t num_regions, int num_levels) {
    return std::make_unique<RandomPolicy>(seed, region, num_regions, num_levels);
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::size_t region, std::size_t num_regions,
                                    int num_levels) {
    switch (spec.kind) {
        case PolicyKind::ExtremalMin:
        case PolicyKind::ExtremalMax: {
            const int mu = spec.kind == PolicyKind::ExtremalMin ? 0 : num_levels - 1;
            const auto s = rate_to_level(spec.action.savings, num_levels);
            if (!s) throw ConfigError("extremal policy savings rate is not on the action grid");
            return extremal_policy(mu, *s, num_regions, num_levels);
        }
        case PolicyKind::Constant: return constant_policy(spec.action, region, num_regions, num_levels);
        case PolicyKind::Random: return random_policy(spec.seed, region, num_regions, num_levels);
    }
    throw ConfigError("unknown policy kind");
}

PolicySpec PolicySpec::extremal_min(double savings) {
    PolicySpec s;
    s.kind = PolicyKind::ExtremalMin;
    s.action.savings = savings;
    return s;
}

PolicySpec PolicySpec::extremal_max(double savings) {
    PolicySpec s = extremal_min(savings);
    s.kind = PolicyKind::ExtremalMax;
    return s;
}

PolicySpec PolicySpec::constant(const ActionTemplate& action) {
    PolicySpec s;
    s.kind = PolicyKind::Constant;
    s.action = action;
    return s;
}

PolicySpec PolicySpec::random(std::optional<std::uint64_t> seed) {
    PolicySpec s;
    s.kind = PolicyKind::Random;
    s.seed = seed;
    return s;
}

PolicySpec parse_policy_spec(const std::string& raw) {
    const std::string text = trim(raw);
    const auto open = text.find('(');
    const std::string head = trim(text.substr(0, open));
    std::string args;
    if (open != std::string::npos) {
        if (text.back() != ')') throw ConfigError("policy '" + text + "': missing ')'");
        args = text.substr(open + 1, text.size() - open - 2);
    }

    PolicySpec spec;
    if (head == "random") {
        spec.kind = PolicyKind::Random;
        if (!trim(args).empty()) {
            const std::string s = trim(args);
            std::uint64_t seed = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ConfigError("policy '" + text + "': bad seed");
            spec.seed = seed;
        }
        return spec;
    }
    if (head == "extremal_min") {
        spec = PolicySpec::extremal_min();
    } else if (head == "extremal_max") {
        spec = PolicySpec::extremal_max();
    } else if (head == "constant") {
        spec.kind = PolicyKind::Constant;
    } else {
        throw ConfigError("unknown policy '" + text +
                          "' (expected extremal_min|extremal_max|constant(...)|random(seed))");
    }

    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("policy '" + text + "': expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        auto& a = spec.action;
        if (key == "s") {
            a.savings = parse_number(value, text);
        } else if (spec.kind != PolicyKind::Constant) {
            throw ConfigError("policy '" + text + "': extremal policies only accept s=");
        } else if (key == "mu") {
            a.mitigation = parse_number(value, text);
        } else if (key == "px") {
            a.export_limit = parse_number(value, text);
        } else if (key == "tau") {
            a.tariff = parse_number(value, text);
        } else if (key == "bid") {
            a.import_bid = parse_number(value, text);
        } else if (key == "propose") {
            std::tie(a.propose_own, a.propose_other) = parse_pair(value, text);
        } else if (key == "accept") {
            a.accept_proposals = parse_number(value, text) != 0.0;
        } else if (key == "join") {
            a.join_club = parse_number(value, text) != 0.0;
        } else if (key == "club") {
            std::tie(a.club_mu_min, a.club_tau_min) = parse_pair(value, text);
        } else {
            throw ConfigError("policy '" + text + "': unknown key '" + key + "'");
        }
    }
    return spec;
}

std::string to_string(const PolicySpec& spec) {
    std::ostringstream out;
    out.precision(17);
    const auto& a = spec.action;
    switch (spec.kind) {
        case PolicyKind::ExtremalMin: out << "extremal_min(s=" << a.savings << ")"; break;
        case PolicyKind::ExtremalMax: out << "extremal_max(s=" << a.savings << ")"; break;
        case PolicyKind::Random:
            out << "random";
            if (spec.seed) out << "(" << *spec.seed << ")";
            break;
        case PolicyKind::Constant:
            out << "constant(s=" << a.savings << ",mu=" << a.mitigation << ",px=" << a.export_limit
                << ",tau=" << a.tariff << ",bid=" << a.import_bid << ",propose=" << a.propose_own << "/"
                << a.propose_other << ",accept=" << (a.accept_proposals ? 1 : 0)
                << ",join=" << (a.join_club ? 1 : 0) << ",club=" << a.club_mu_min << "/" << a.club_tau_min
                << ")";
            break;
    }
    return out.str();
}

}  // namespace rice
