#include "files.hpp"

#include <cinttypes>
#include <tuple>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace emdtn {

namespace {

void append_jet(std::string& out, const char* name, const Jet3& j) {
    char buf[160];
    for (int k3 = 0; k3 <= j.order(); ++k3)
        for (int k2 = 0; k2 + k3 <= j.order(); ++k2)
            for (int k1 = 0; k1 + k2 + k3 <= j.order(); ++k1) {
                const Cplx v = j.at(k1, k2, k3);
                if (v == Cplx(0.0)) continue;
                std::snprintf(buf, sizeof buf, "coef %s %d %d %d %.17g %.17g\n", name, k1, k2, k3, v.real(), v.imag());
                out += buf;
            }
}

struct LineReader {
    std::istringstream in;
    std::string line;
    int lineno = 0;
    explicit LineReader(const std::string& text) : in(text) {}
    bool next() {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("line " + std::to_string(lineno) + ": " + why);
    }
};

}  // namespace

std::string scenario_to_text(const Scenario& s) {
    std::string out;
    char buf[128];
    out += "emdtn-scenario v1\n";
    std::snprintf(buf, sizeof buf, "omega %.17g\n", s.omega);
    out += buf;
    std::snprintf(buf, sizeof buf, "order %d\n", s.order);
    out += buf;
    std::snprintf(buf, sizeof buf, "depth %d\n", s.depth);
    out += buf;
    if (s.seed) {
        std::snprintf(buf, sizeof buf, "seed %" PRIu64 "\n", *s.seed);
        out += buf;
    }
    append_jet(out, "g11", s.g.g11);
    append_jet(out, "g12", s.g.g12);
    append_jet(out, "g22", s.g.g22);
    append_jet(out, "mu", s.mu);
    append_jet(out, "sigma", s.sigma);
    out += "end\n";
    return out;
}

Scenario scenario_from_text(const std::string& text) {
    LineReader r(text);
    if (!r.next() || r.line != "emdtn-scenario v1") r.fail("expected 'emdtn-scenario v1' header");
    Scenario s;
    s.order = -1;
    bool have_omega = false, ended = false;
    struct Pending {
        int k1, k2, k3;
        Cplx v;
    };
    std::map<std::string, std::vector<Pending>> coefs;
    std::optional<std::uint64_t> seed;
    int depth = 4;
    double omega = 0.0;
    while (r.next()) {
        std::istringstream ls(r.line);
        std::string key;
        ls >> key;
        if (key == "end") {
            ended = true;
            break;
        } else if (key == "omega") {
            if (!(ls >> omega)) r.fail("bad omega");
            have_omega = true;
        } else if (key == "order") {
            if (!(ls >> s.order)) r.fail("bad order");
        } else if (key == "depth") {
            if (!(ls >> depth)) r.fail("bad depth");
        } else if (key == "seed") {
            std::uint64_t v;
            if (!(ls >> v)) r.fail("bad seed");
            seed = v;
        } else if (key == "coef") {
            std::string field;
            Pending p;
            double re, im;
            if (!(ls >> field >> p.k1 >> p.k2 >> p.k3 >> re >> im)) r.fail("bad coef line");
            p.v = Cplx(re, im);
            coefs[field].push_back(p);
        } else {
            r.fail("unknown key '" + key + "'");
        }
    }
    if (!ended) throw ParseError("missing 'end'");
    if (!have_omega || s.order < 0) throw ParseError("scenario needs omega and order");
    if (s.order < 2 || s.order > kMaxJetOrder) throw ParseError("order out of range");
    if (!(omega > 0.0)) throw NonPositiveParameter("omega must be positive");
    s.omega = omega;
    s.depth = depth;
    s.seed = seed;
    auto build_jet = [&](const char* name, Cplx def0) {
        Jet3 j(s.order);
        j.set(0, 0, 0, def0);
        auto it = coefs.find(name);
        if (it != coefs.end())
            for (const auto& p : it->second) {
                if (p.k1 < 0 || p.k2 < 0 || p.k3 < 0 || p.k1 + p.k2 + p.k3 > s.order)
                    throw ParseError(std::string("multi-index out of range for ") + name);
                j.set(p.k1, p.k2, p.k3, p.v);
            }
        return j;
    };
    s.g.g11 = build_jet("g11", Cplx(1.0));
    s.g.g12 = build_jet("g12", Cplx(0.0));
    s.g.g22 = build_jet("g22", Cplx(1.0));
    s.mu = build_jet("mu", Cplx(1.0));
    s.sigma = build_jet("sigma", Cplx(1.0));
    s.build();  // validates positivity invariants
    return s;
}

void save_scenario(const std::string& path, const Scenario& s) { write_file(path, scenario_to_text(s)); }

Scenario load_scenario(const std::string& path) { return scenario_from_text(read_file(path)); }

std::string symbols_to_text(const SymbolTable& t, double omega) {
    if (t.slots.empty()) throw Error("symbols_to_text: empty table");
    std::string out;
    char buf[192];
    out += "emdtn-symbols v1\n";
    out += "operator " + (t.name.empty() ? std::string("psi") : t.name) + "\n";
    std::snprintf(buf, sizeof buf, "shape %d %d\n", t.rows, t.cols);
    out += buf;
    const Ctx& ctx = t.slots.front().ctx();
    std::snprintf(buf, sizeof buf, "order %d\n", ctx->order);
    out += buf;
    std::snprintf(buf, sizeof buf, "omega %.17g\n", omega);
    out += buf;
    std::snprintf(buf, sizeof buf, "degrees %d %d\n", t.top, t.lowest());
    out += buf;
    append_jet(out, "qref.up11", ctx->up11);
    append_jet(out, "qref.up12", ctx->up12);
    append_jet(out, "qref.up22", ctx->up22);
    for (const auto& slot : t.slots) {
        std::snprintf(buf, sizeof buf, "slot %d qpow %d\n", slot.degree(), slot.q_power());
        out += buf;
        for (int r = 0; r < slot.rows(); ++r)
            for (int c = 0; c < slot.cols(); ++c)
                for (const auto& [k, v] : slot.entry(r, c).terms())
                    for (int k3 = 0; k3 <= v.order(); ++k3)
                        for (int k2 = 0; k2 + k3 <= v.order(); ++k2)
                            for (int k1 = 0; k1 + k2 + k3 <= v.order(); ++k1) {
                                const Cplx x = v.at(k1, k2, k3);
                                if (x == Cplx(0.0)) continue;
                                std::snprintf(buf, sizeof buf, "term %d %d %d %d %d %d %d %d %.17g %.17g\n", r, c, k.d1,
                                              k.d2, k.e, k1, k2, k3, x.real(), x.imag());
                                out += buf;
                            }
    }
    out += "end\n";
    return out;
}

SymbolTable symbols_from_text(const std::string& text, double* omega_out) {
    LineReader r(text);
    if (!r.next() || r.line != "emdtn-symbols v1") r.fail("expected 'emdtn-symbols v1' header");
    SymbolTable t;
    int order = -1, top = 0, lowest = 0;
    bool have_degrees = false, ended = false;
    double omega = 1.0;
    std::map<std::string, std::vector<std::array<double, 5>>> qref;  // k1,k2,k3,re,im
    struct TermLine {
        int slot_index;
        int rr, cc, d1, d2, e, k1, k2, k3;
        Cplx v;
    };
    std::vector<std::pair<int, int>> slot_meta;  // degree, qpow
    std::vector<TermLine> terms;
    while (r.next()) {
        std::istringstream ls(r.line);
        std::string key;
        ls >> key;
        if (key == "end") {
            ended = true;
            break;
        } else if (key == "operator") {
            ls >> t.name;
        } else if (key == "shape") {
            if (!(ls >> t.rows >> t.cols)) r.fail("bad shape");
        } else if (key == "order") {
            if (!(ls >> order)) r.fail("bad order");
        } else if (key == "omega") {
            if (!(ls >> omega)) r.fail("bad omega");
        } else if (key == "degrees") {
            if (!(ls >> top >> lowest)) r.fail("bad degrees");
            have_degrees = true;
        } else if (key == "coef") {
            std::string field;
            std::array<double, 5> a;
            if (!(ls >> field >> a[0] >> a[1] >> a[2] >> a[3] >> a[4])) r.fail("bad qref coef");
            qref[field].push_back(a);
        } else if (key == "slot") {
            int deg, qpow;
            std::string kw;
            if (!(ls >> deg >> kw >> qpow) || kw != "qpow") r.fail("bad slot line");
            slot_meta.push_back({deg, qpow});
        } else if (key == "term") {
            if (slot_meta.empty()) r.fail("term before any slot");
            TermLine tl;
            tl.slot_index = static_cast<int>(slot_meta.size()) - 1;
            double re, im;
            if (!(ls >> tl.rr >> tl.cc >> tl.d1 >> tl.d2 >> tl.e >> tl.k1 >> tl.k2 >> tl.k3 >> re >> im))
                r.fail("bad term line");
            tl.v = Cplx(re, im);
            terms.push_back(tl);
        } else {
            r.fail("unknown key '" + key + "'");
        }
    }
    if (!ended) throw ParseError("missing 'end'");
    if (order < 0 || !have_degrees || t.rows <= 0 || t.cols <= 0) throw ParseError("incomplete symbol header");
    if (static_cast<int>(slot_meta.size()) != top - lowest + 1) throw ParseError("slot count does not match degrees");
    auto build_jet = [&](const char* name) {
        Jet3 j(order);
        auto it = qref.find(name);
        if (it == qref.end()) throw ParseError(std::string("missing qref block ") + name);
        for (const auto& a : it->second) j.set(int(a[0]), int(a[1]), int(a[2]), Cplx(a[3], a[4]));
        return j;
    };
    auto nq = std::make_shared<QContext>();
    nq->order = order;
    nq->up11 = build_jet("qref.up11");
    nq->up12 = build_jet("qref.up12");
    nq->up22 = build_jet("qref.up22");
    nq->up11_inv = jet_inv(nq->up11);
    const Ctx ctx = nq;
    t.top = top;
    // accumulate term jets per (slot, entry, monomial)
    std::map<std::tuple<int, int, int, int, int, int>, Jet3> jets;  // slot,r,c,d1,d2,e
    for (const auto& tl : terms) {
        auto key = std::make_tuple(tl.slot_index, tl.rr, tl.cc, tl.d1, tl.d2, tl.e);
        auto it = jets.find(key);
        if (it == jets.end()) it = jets.emplace(key, Jet3(order)).first;
        if (tl.k1 + tl.k2 + tl.k3 > order) throw ParseError("term multi-index out of range");
        it->second.set(tl.k1, tl.k2, tl.k3, tl.v);
    }
    t.slots.reserve(slot_meta.size());
    for (std::size_t i = 0; i < slot_meta.size(); ++i) {
        if (slot_meta[i].first != top - static_cast<int>(i)) throw ParseError("slots out of order");
        t.slots.push_back(SymbolElement::make(ctx, t.rows, t.cols, slot_meta[i].first, slot_meta[i].second));
    }
    for (const auto& [key, jet] : jets) {
        const auto [si, rr, cc, d1, d2, e] = key;
        t.slots[static_cast<std::size_t>(si)].entry(rr, cc).add_term(d1, d2, e, jet);
    }
    if (omega_out != nullptr) *omega_out = omega;
    return t;
}

void save_symbols(const std::string& path, const SymbolTable& t, double omega) {
    write_file(path, symbols_to_text(t, omega));
}

SymbolTable load_symbols(const std::string& path, double* omega_out) {
    return symbols_from_text(read_file(path), omega_out);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    os << content;
    if (!os) throw Error("write failed for " + path);
}

}  // namespace emdtn
