#include "enlab/space.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace enlab {

// --- Partition ---------------------------------------------------------------

Partition Partition::from_cell_of(std::vector<int> cof) {
    Partition p;
    p.cell_of = std::move(cof);
    int ncells = 0;
    for (int c : p.cell_of) ncells = std::max(ncells, c + 1);
    p.cells.assign(ncells, {});
    for (int a = 0; a < (int)p.cell_of.size(); ++a) p.cells[p.cell_of[a]].push_back(a);
    return p;
}

bool Partition::refines(const Partition& coarser) const {
    for (const auto& cell : cells) {
        int c0 = coarser.cell_of[cell.front()];
        for (int a : cell)
            if (coarser.cell_of[a] != c0) return false;
    }
    return true;
}

bool Partition::operator==(const Partition& o) const {
    if (cell_of.size() != o.cell_of.size()) return false;
    return refines(o) && o.refines(*this);
}

// --- RandomVariable ----------------------------------------------------------

Rational PolyPiece::value_at(const Rational& u) const {
    Rational v(0), p(1);
    for (const auto& c : coef) { v += c * p; p *= u; }
    return v;
}

Rational PolyPiece::integral(const Rational& a, const Rational& b) const {
    // antiderivative sum_k coef[k] u^{k+1}/(k+1), evaluated exactly
    auto anti = [&](const Rational& u) {
        Rational v(0), p = u;
        for (size_t k = 0; k < coef.size(); ++k) {
            v += coef[k] * p / Rational((long long)k + 1);
            p *= u;
        }
        return v;
    };
    return anti(b) - anti(a);
}

Rational PolyPiece::integral() const { return integral(u0, u1); }

RandomVariable RandomVariable::constant(int n_atoms, const Rational& c) {
    RandomVariable x;
    x.atom.assign(n_atoms, {PolyPiece{Rational(0), Rational(1), {c}}});
    return x;
}

RandomVariable RandomVariable::from_values(std::vector<Rational> values) {
    RandomVariable x;
    x.atom.reserve(values.size());
    for (auto& v : values)
        x.atom.push_back({PolyPiece{Rational(0), Rational(1), {std::move(v)}}});
    return x;
}

bool RandomVariable::is_plain() const {
    for (const auto& ps : atom)
        if (ps.size() != 1 || ps[0].coef.size() > 1) return false;
    return true;
}

Rational RandomVariable::plain_value(int a) const {
    const auto& ps = atom[a];
    if (ps.size() != 1 || ps[0].coef.size() > 1)
        fail("NotPlain", "random variable depends on the auxiliary coordinate");
    return ps[0].coef.empty() ? Rational(0) : ps[0].coef[0];
}

Rational RandomVariable::mean(int a) const {
    Rational s(0);
    for (const auto& p : atom[a]) s += p.integral();
    return s;
}

Rational RandomVariable::integral(int a, const Rational& u0, const Rational& u1) const {
    Rational s(0);
    for (const auto& p : atom[a]) {
        Rational lo = max(u0, p.u0), hi = min(u1, p.u1);
        if (lo < hi) s += p.integral(lo, hi);
    }
    return s;
}

// --- FilteredSpace -----------------------------------------------------------

int FilteredSpace::index_at(const TimePoint& t) const {
    if (t.infinite) return n_grid() - 1;
    int k = 0;
    while (k + 1 < n_grid() && grid[k + 1] <= t.t) ++k;
    if (t.t < grid[0]) fail("TimeBeforeOrigin", "time precedes the grid origin");
    return k;
}

int FilteredSpace::index_before(const TimePoint& t) const {
    if (t.infinite) return n_grid() - 1;
    if (t.t.is_zero()) return -1;
    int k = index_at(t);
    if (grid[k] == t.t) return k - 1;
    return k;
}

const Partition& FilteredSpace::partition(int k) const {
    if (k >= 0) return partitions[k];
    if ((int)trivial_.cell_of.size() != n_atoms())
        trivial_ = Partition::from_cell_of(std::vector<int>(n_atoms(), 0));
    return trivial_;
}

Rational FilteredSpace::cell_weight(int k, int cell) const {
    Rational s(0);
    for (int a : partition(k).cells[cell]) s += weights[a];
    return s;
}

std::vector<Rational> FilteredSpace::cell_average(const std::vector<Rational>& per_atom, int k) const {
    const Partition& p = partition(k);
    std::vector<Rational> out(n_atoms());
    for (const auto& cell : p.cells) {
        Rational num(0), den(0);
        for (int a : cell) { num += weights[a] * per_atom[a]; den += weights[a]; }
        Rational avg = num / den;
        for (int a : cell) out[a] = avg;
    }
    return out;
}

void FilteredSpace::validate() const {
    if (atom_ids.empty()) fail("EmptySpace", "no atoms");
    if (atom_ids.size() != weights.size()) fail("BadSpace", "atom/weight count mismatch");
    {
        std::set<std::string> seen;
        for (const auto& id : atom_ids)
            if (!seen.insert(id).second) fail("DuplicateAtomId", "atom id '" + id + "' repeats");
    }
    Rational total(0);
    for (int a = 0; a < n_atoms(); ++a) {
        if (weights[a].signum() <= 0) fail("WeightsNotNormalized", "atom " + std::to_string(a) + " has non-positive weight");
        total += weights[a];
    }
    if (!(total == Rational(1))) fail("WeightsNotNormalized", "weights sum to " + total.to_string());

    if (grid.empty()) fail("UnsortedGrid", "empty grid (index 0)");
    if (!grid[0].is_zero()) fail("UnsortedGrid", "grid must start at 0 (index 0)");
    for (int k = 1; k < n_grid(); ++k)
        if (!(grid[k - 1] < grid[k]))
            fail("UnsortedGrid", "grid not strictly increasing at index " + std::to_string(k));

    if ((int)partitions.size() != n_grid()) fail("BadSpace", "one partition required per grid index");
    for (int k = 0; k < n_grid(); ++k) {
        const Partition& p = partitions[k];
        if ((int)p.cell_of.size() != n_atoms())
            fail("MalformedPartition", "partition at index " + std::to_string(k) + " does not cover all atoms");
        std::vector<int> count(p.cells.size(), 0);
        for (int a = 0; a < n_atoms(); ++a) {
            if (p.cell_of[a] < 0 || p.cell_of[a] >= (int)p.cells.size())
                fail("MalformedPartition", "bad cell id at index " + std::to_string(k));
            count[p.cell_of[a]]++;
        }
        for (size_t c = 0; c < p.cells.size(); ++c)
            if (count[c] == 0 || count[c] != (int)p.cells[c].size())
                fail("MalformedPartition", "empty or inconsistent cell at index " + std::to_string(k));
        if (k > 0 && !p.refines(partitions[k - 1]))
            fail("NonRefiningPartition", "partition at index " + std::to_string(k) + " does not refine index " + std::to_string(k - 1));
    }
}

FilteredSpace build_space(std::vector<std::string> atom_ids,
                          std::vector<Rational> weights,
                          std::vector<Rational> grid,
                          std::vector<std::vector<std::vector<int>>> partition_cells) {
    FilteredSpace sp;
    sp.atom_ids = std::move(atom_ids);
    sp.weights = std::move(weights);
    sp.grid = std::move(grid);
    for (size_t k = 0; k < partition_cells.size(); ++k) {
        std::vector<int> cell_of(sp.atom_ids.size(), -1);
        for (size_t c = 0; c < partition_cells[k].size(); ++c)
            for (int a : partition_cells[k][c]) {
                if (a < 0 || a >= (int)sp.atom_ids.size() || cell_of[a] != -1)
                    fail("MalformedPartition", "atom listed zero or multiple times at index " + std::to_string(k));
                cell_of[a] = (int)c;
            }
        for (int c : cell_of)
            if (c == -1) fail("MalformedPartition", "atom missing from partition at index " + std::to_string(k));
        sp.partitions.push_back(Partition::from_cell_of(std::move(cell_of)));
    }
    sp.validate();
    return sp;
}

RandomVariable condition(const RandomVariable& x, const FilteredSpace& sp, int k) {
    if (k < -1 || k >= sp.n_grid()) fail("IndexOutOfRange", "grid index " + std::to_string(k));
    std::vector<Rational> means(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) means[a] = x.mean(a);
    return RandomVariable::from_values(sp.cell_average(means, k));
}

// --- Stopping times ----------------------------------------------------------

static bool set_is_cell_union(const std::vector<char>& member, const Partition& p) {
    for (const auto& cell : p.cells) {
        int c0 = member[cell.front()];
        for (int a : cell)
            if (member[a] != c0) return false;
    }
    return true;
}

StoppingClassification is_stopping_time(const StoppingTime& T, const FilteredSpace& sp) {
    StoppingClassification r;
    std::set<Rational> values;
    for (const auto& t : T.value)
        if (t.is_finite()) values.insert(t.t);

    r.stopping = true;
    for (const auto& t : values) {
        std::vector<char> le(sp.n_atoms(), 0);
        for (int a = 0; a < sp.n_atoms(); ++a)
            le[a] = T.value[a].is_finite() && T.value[a].t <= t;
        if (!set_is_cell_union(le, sp.partition(sp.index_at(TimePoint::at(t))))) {
            r.stopping = false;
            break;
        }
    }
    if (!r.stopping) return r;

    r.predictable = true;
    for (const auto& t : values) {
        std::vector<char> eq(sp.n_atoms(), 0);
        for (int a = 0; a < sp.n_atoms(); ++a)
            eq[a] = T.value[a].is_finite() && T.value[a].t == t;
        if (!set_is_cell_union(eq, sp.partition(sp.index_before(TimePoint::at(t))))) {
            r.predictable = false;
            break;
        }
    }
    return r;
}

Partition sigma_field_at(const StoppingTime& T, const FilteredSpace& sp) {
    // Closure: the F_T-atom of a grows by absorbing every F_t-cell inside
    // {T <= t} that it touches, for each finite value t of T.  Seeds are
    // F_infinity cells (F_T is a sub-sigma-field of F_infinity).
    std::set<Rational> values;
    for (const auto& t : T.value)
        if (t.is_finite()) values.insert(t.t);

    const Partition& leaves = sp.partitions.back();
    std::vector<int> group(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) group[a] = leaves.cell_of[a];

    auto merge = [&](int ga, int gb) {
        if (ga == gb) return false;
        for (int& g : group)
            if (g == gb) g = ga;
        return true;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& t : values) {
            const Partition& p = sp.partition(sp.index_at(TimePoint::at(t)));
            for (const auto& cell : p.cells) {
                bool inside = true;
                for (int a : cell)
                    if (!(T.value[a].is_finite() && T.value[a].t <= t)) { inside = false; break; }
                if (!inside) continue;
                for (size_t i = 1; i < cell.size(); ++i)
                    changed |= merge(group[cell[0]], group[cell[i]]);
            }
        }
    }

    // renumber groups densely
    std::map<int, int> remap;
    std::vector<int> cell_of(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        auto [it, fresh] = remap.try_emplace(group[a], (int)remap.size());
        cell_of[a] = it->second;
    }
    return Partition::from_cell_of(std::move(cell_of));
}

// --- JSON --------------------------------------------------------------------

using nlohmann::json;

FilteredSpace space_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail("BadJson", e.what());
    }
    for (const char* key : {"grid", "atoms", "partitions"})
        if (!j.contains(key)) fail("MissingKey", std::string("space file lacks \"") + key + "\"");

    std::vector<std::string> ids;
    std::vector<Rational> weights, grid;
    for (const auto& a : j["atoms"]) {
        if (!a.contains("id") || !a.contains("p")) fail("MissingKey", "atom entry needs \"id\" and \"p\"");
        ids.push_back(a["id"].get<std::string>());
        weights.push_back(Rational::parse(a["p"].get<std::string>()));
    }
    for (const auto& g : j["grid"]) grid.push_back(Rational::parse(g.get<std::string>()));

    std::map<std::string, int> index;
    for (int a = 0; a < (int)ids.size(); ++a) index[ids[a]] = a;

    std::vector<std::vector<std::vector<int>>> parts;
    for (const auto& pk : j["partitions"]) {
        std::vector<std::vector<int>> cells;
        for (const auto& cell : pk) {
            std::vector<int> c;
            for (const auto& id : cell) {
                auto it = index.find(id.get<std::string>());
                if (it == index.end()) fail("UnknownAtomId", "partition references '" + id.get<std::string>() + "'");
                c.push_back(it->second);
            }
            cells.push_back(std::move(c));
        }
        parts.push_back(std::move(cells));
    }
    return build_space(std::move(ids), std::move(weights), std::move(grid), std::move(parts));
}

std::string space_to_json_text(const FilteredSpace& sp) {
    json j;
    j["grid"] = json::array();
    for (const auto& g : sp.grid) j["grid"].push_back(g.to_string());
    j["atoms"] = json::array();
    for (int a = 0; a < sp.n_atoms(); ++a)
        j["atoms"].push_back({{"id", sp.atom_ids[a]}, {"p", sp.weights[a].to_string()}});
    j["partitions"] = json::array();
    for (const auto& p : sp.partitions) {
        json cells = json::array();
        for (const auto& cell : p.cells) {
            json c = json::array();
            for (int a : cell) c.push_back(sp.atom_ids[a]);
            cells.push_back(c);
        }
        j["partitions"].push_back(cells);
    }
    return j.dump(2);
}

} // namespace enlab
