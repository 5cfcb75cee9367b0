#include "oblsynth/dwa.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace oblsynth {

namespace {

std::vector<std::vector<StateId>> successor_lists(const Automaton& a) {
  std::vector<std::vector<StateId>> succ(a.size());
  for (StateId q = 0; q < a.size(); ++q) succ[q] = a.successors(q);
  return succ;
}

std::vector<bool> bits_of(const Dwa& a, StateId q) {
  if (!a.provenance.empty()) return a.provenance[q];
  return {a.accepting[q] != 0};
}

void set_single_provenance(Dwa& a) {
  a.provenance.clear();
  for (StateId q = 0; q < a.size(); ++q) a.provenance.push_back({a.accepting[q] != 0});
}

}  // namespace

Dwa build_component(PrefixQuantifier quant, const Dfa& dfa) {
  Dfa d = trim(dfa);
  const bool forced = quant == PrefixQuantifier::Forall;
  if ((d.accepting[d.initial] != 0) != forced) {
    bool incoming = false;
    for (const auto& es : d.edges) {
      for (const auto& e : es) incoming = incoming || e.dst == d.initial;
    }
    if (incoming) {
      const StateId fresh = d.add_state(forced);
      d.edges[fresh] = d.edges[d.initial];
      d.initial = fresh;
    } else {
      d.accepting[d.initial] = forced;
    }
  }

  // exists: accepting states absorb; forall: rejecting states absorb.
  const bool sink_acceptance = quant == PrefixQuantifier::Exists;
  Dwa out;
  out.store = d.store;
  out.alphabet = d.alphabet;
  std::vector<StateId> index(d.size());
  std::optional<StateId> sink;
  for (StateId q = 0; q < d.size(); ++q) {
    if ((d.accepting[q] != 0) == sink_acceptance && q != d.initial) {
      if (!sink) sink = out.add_state(sink_acceptance);
      index[q] = *sink;
    } else {
      index[q] = out.add_state(d.accepting[q]);
    }
  }
  for (StateId q = 0; q < d.size(); ++q) {
    if (sink && index[q] == *sink) continue;
    for (const auto& e : d.edges[q]) out.add_edge(index[q], e.guard, index[e.dst]);
  }
  if (sink) out.edges[*sink] = {{out.store->bdd_true(), *sink}};
  out.initial = index[d.initial];
  out = trim(out);
  set_single_provenance(out);
  return out;
}

namespace {

Dwa product(const Dwa& a, const Dwa& b, bool conjunction) {
  if (a.store != b.store) throw std::invalid_argument("product of automata over different letter stores");
  Dwa out;
  out.store = a.store;
  out.alphabet = a.alphabet;
  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::vector<std::pair<StateId, StateId>> pairs;
  auto intern = [&](StateId p, StateId q) {
    auto it = ids.find({p, q});
    if (it != ids.end()) return it->second;
    const bool acc = conjunction ? (a.accepting[p] && b.accepting[q]) : (a.accepting[p] || b.accepting[q]);
    const StateId id = out.add_state(acc);
    std::vector<bool> prov = bits_of(a, p);
    const std::vector<bool> right = bits_of(b, q);
    prov.insert(prov.end(), right.begin(), right.end());
    out.provenance.push_back(std::move(prov));
    ids.emplace(std::pair{p, q}, id);
    pairs.push_back({p, q});
    return id;
  };
  out.initial = intern(a.initial, b.initial);
  for (StateId s = 0; s < pairs.size(); ++s) {
    const auto [p, q] = pairs[s];
    for (const auto& ea : a.edges[p]) {
      for (const auto& eb : b.edges[q]) {
        bdd::Bdd g = ea.guard & eb.guard;
        if (!g.is_false()) out.add_edge(s, g, intern(ea.dst, eb.dst));
      }
    }
  }
  return out;
}

}  // namespace

Dwa dwa_and(const Dwa& a, const Dwa& b) { return product(a, b, true); }
Dwa dwa_or(const Dwa& a, const Dwa& b) { return product(a, b, false); }

Dwa dwa_not(const Dwa& a) {
  Dwa out = a;
  for (auto& f : out.accepting) f = !f;
  out.scc.clear();
  out.rank.clear();
  return out;
}

void compute_ranks(Dwa& a) {
  const auto succ = successor_lists(a);
  const std::size_t count = tarjan_scc(succ, a.scc);
  std::vector<std::vector<StateId>> members(count);
  for (StateId q = 0; q < a.size(); ++q) members[a.scc[q]].push_back(q);
  std::vector<int> scc_rank(count, 0);
  // Successor SCCs have smaller ids, so ascending order is bottom-up.
  for (std::size_t s = 0; s < count; ++s) {
    int l = 0;
    bool recurrent = members[s].size() > 1;
    for (const StateId q : members[s]) {
      for (const StateId t : succ[q]) {
        if (static_cast<std::size_t>(a.scc[t]) == s) {
          recurrent = true;
        } else {
          l = std::max(l, scc_rank[a.scc[t]]);
        }
      }
    }
    const bool acc = a.accepting[members[s].front()] != 0;
    scc_rank[s] = (recurrent && ((l % 2 == 0) != acc)) ? l + 1 : l;
  }
  a.rank.assign(a.size(), 0);
  for (StateId q = 0; q < a.size(); ++q) a.rank[q] = scc_rank[a.scc[q]];
}

Dwa minimize_dwa(const Dwa& input) {
  Dwa a = trim(input);
  compute_ranks(a);
  for (StateId q = 0; q < a.size(); ++q) a.accepting[q] = a.rank[q] % 2 == 0;
  a.clear_annotations();
  return canonical_form(minimize_automaton(a));
}

WeaknessReport check_weak(const Dwa& a) {
  WeaknessReport r;
  std::vector<int> scc;
  const std::size_t count = tarjan_scc(successor_lists(a), scc);
  std::vector<int> acc_witness(count, -1), rej_witness(count, -1);
  for (StateId q = 0; q < a.size(); ++q) {
    (a.accepting[q] ? acc_witness : rej_witness)[scc[q]] = static_cast<int>(q);
  }
  for (std::size_t s = 0; s < count; ++s) {
    if (acc_witness[s] >= 0 && rej_witness[s] >= 0) {
      r.weak = false;
      r.scc = static_cast<int>(s);
      r.accepting_state = static_cast<StateId>(acc_witness[s]);
      r.rejecting_state = static_cast<StateId>(rej_witness[s]);
      r.message = "SCC " + std::to_string(s) + " mixes accepting state " + std::to_string(r.accepting_state) +
                  " and rejecting state " + std::to_string(r.rejecting_state);
      return r;
    }
  }
  return r;
}

SigmaPartition check_sigma_partition(const Dwa& a) {
  if (a.provenance.size() != a.size()) throw std::invalid_argument("check_sigma_partition needs provenance");
  SigmaPartition p;
  auto fail = [&](std::string msg) {
    if (p.valid) {
      p.valid = false;
      p.violation = std::move(msg);
    }
  };
  for (StateId q = 0; q < a.size(); ++q) {
    const auto& sigma = a.provenance[q];
    p.blocks[sigma].push_back(q);
    auto [it, fresh] = p.accepting.emplace(sigma, a.accepting[q] != 0);
    if (!fresh && it->second != (a.accepting[q] != 0)) {
      fail("block of state " + std::to_string(q) + " is not homogeneous");
    }
  }
  std::vector<int> scc;
  const auto succ = successor_lists(a);
  const std::size_t count = tarjan_scc(succ, scc);
  std::vector<int> rep(count, -1);
  for (StateId q = 0; q < a.size(); ++q) {
    if (rep[scc[q]] < 0) {
      rep[scc[q]] = static_cast<int>(q);
    } else if (a.provenance[rep[scc[q]]] != a.provenance[q]) {
      fail("SCC " + std::to_string(scc[q]) + " spans two sigma blocks (states " + std::to_string(rep[scc[q]]) +
           ", " + std::to_string(q) + ")");
    }
  }
  // Reachability between blocks must be one-directional.
  std::map<std::vector<bool>, std::size_t> block_id;
  for (const auto& [sigma, qs] : p.blocks) block_id.emplace(sigma, block_id.size());
  const std::size_t nb = block_id.size();
  std::vector<std::vector<char>> reach(nb, std::vector<char>(nb, 0));
  for (StateId q = 0; q < a.size(); ++q) {
    for (const StateId t : succ[q]) reach[block_id[a.provenance[q]]][block_id[a.provenance[t]]] = 1;
  }
  for (std::size_t k = 0; k < nb; ++k) {
    for (std::size_t i = 0; i < nb; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < nb; ++j) reach[i][j] = reach[i][j] || reach[k][j];
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = i + 1; j < nb; ++j) {
      if (reach[i][j] && reach[j][i]) fail("sigma blocks " + std::to_string(i) + " and " + std::to_string(j) + " reach each other");
    }
  }
  return p;
}

bool dwa_accepts_lasso(const Dwa& a, const Lasso& lasso) {
  StateId q = a.initial;
  for (const Letter l : lasso.stem.letters) q = a.step(q, l);
  std::unordered_map<StateId, std::size_t> first_seen;
  std::vector<std::vector<StateId>> rounds;
  while (first_seen.emplace(q, rounds.size()).second) {
    rounds.emplace_back();
    for (const Letter l : lasso.loop.letters) {
      q = a.step(q, l);
      rounds.back().push_back(q);
    }
  }
  for (std::size_t r = first_seen.at(q); r < rounds.size(); ++r) {
    for (const StateId s : rounds[r]) {
      if (a.accepting[s]) return true;
    }
  }
  return false;
}

const char* to_string(MinMode m) { return m == MinMode::Component ? "component" : "incremental"; }

MinMode parse_min_mode(const std::string& s) {
  if (s == "component") return MinMode::Component;
  if (s == "incremental") return MinMode::Incremental;
  throw std::invalid_argument("unknown minimization mode '" + s + "' (expected component or incremental)");
}

Combiner::Combiner(ObligationFormula shape) : shape_(std::move(shape)) {
  if (!is_pnf(*shape_)) throw std::invalid_argument("combiner shape must be in positive normal form");
}

bool Combiner::eval(const std::vector<bool>& bits) const {
  return fold<bool>([&](std::size_t i) { return bool(bits.at(i)); }, [](bool x, bool y) { return x && y; },
                    [](bool x, bool y) { return x || y; });
}

PipelineResult compile_obligation(const ObligationFormula& psi, const Alphabet& alphabet,
                                  const PipelineOptions& options) {
  if (!is_pnf(psi)) throw std::invalid_argument("compile_obligation expects positive normal form");
  if (options.tau < 1) throw std::invalid_argument("minimization threshold must be at least 1");
  PipelineResult result;
  result.mode = options.mode;
  auto letters = make_letter_store(alphabet);
  for (const auto& c : components(psi)) {
    const Dfa dfa = minimize_dfa(compile_dfa(c.body, alphabet, letters, options.compile));
    Dwa dwa = minimize_dwa(build_component(c.quantifier, dfa));
    set_single_provenance(dwa);
    result.components.components.push_back(std::move(dwa));
    ++result.minimizations;
  }
  result.components.combiner = Combiner(psi);
  if (options.mode == MinMode::Component) return result;

  std::size_t next = 0;
  std::function<Dwa(const ObligationFormula&)> build = [&](const ObligationFormula& f) -> Dwa {
    if (f.is_component()) return result.components.components[next++];
    std::vector<Dwa> level;
    for (const auto& c : f.children()) level.push_back(build(c));
    const bool conj = f.kind() == ObligationKind::And;
    while (level.size() > 1) {
      std::vector<Dwa> up;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        Dwa p = conj ? dwa_and(level[i], level[i + 1]) : dwa_or(level[i], level[i + 1]);
        ++result.products;
        if (p.size() > options.max_product_states) {
          throw StateBudgetError("product exceeds " + std::to_string(options.max_product_states) + " states", 0);
        }
        if (p.size() <= options.tau) {
          p = minimize_dwa(p);
          ++result.minimizations;
        }
        up.push_back(std::move(p));
      }
      if (level.size() % 2) up.push_back(std::move(level.back()));
      level = std::move(up);
    }
    return std::move(level.front());
  };
  result.automaton = build(psi);
  return result;
}

Dwa explicit_product(const ComponentList& list, std::size_t max_states) {
  const auto& comps = list.components;
  if (comps.empty()) throw std::invalid_argument("explicit_product of an empty component list");
  Dwa out;
  out.store = comps.front().store;
  out.alphabet = comps.front().alphabet;
  std::map<std::vector<StateId>, StateId> ids;
  std::vector<std::vector<StateId>> tuples;
  auto intern = [&](const std::vector<StateId>& t) {
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    if (tuples.size() >= max_states) {
      throw StateBudgetError("explicit product exceeds " + std::to_string(max_states) + " states", 0);
    }
    std::vector<bool> bits;
    for (std::size_t i = 0; i < comps.size(); ++i) bits.push_back(comps[i].accepting[t[i]] != 0);
    const StateId id = out.add_state(list.combiner.eval(bits));
    out.provenance.push_back(bits);
    ids.emplace(t, id);
    tuples.push_back(t);
    return id;
  };
  std::vector<StateId> init;
  for (const auto& c : comps) init.push_back(c.initial);
  out.initial = intern(init);
  for (StateId s = 0; s < tuples.size(); ++s) {
    const std::vector<StateId> cur = tuples[s];
    std::vector<StateId> dst(comps.size());
    std::function<void(std::size_t, const bdd::Bdd&)> expand = [&](std::size_t i, const bdd::Bdd& g) {
      if (i == comps.size()) {
        out.add_edge(s, g, intern(dst));
        return;
      }
      for (const auto& e : comps[i].edges[cur[i]]) {
        bdd::Bdd h = g & e.guard;
        if (h.is_false()) continue;
        dst[i] = e.dst;
        expand(i + 1, h);
      }
    };
    expand(0, out.store->bdd_true());
  }
  return out;
}

// ---------------------------------------------------------------------------
// HOA

namespace {

std::string hoa_label(const Dwa& a, const bdd::Bdd& g) {
  if (g.is_true()) return "t";
  if (g.is_false()) return "f";
  std::string out;
  for (const auto& cube : a.store->cubes(g)) {
    if (!out.empty()) out += " | ";
    std::string c;
    for (const auto& [v, val] : cube) {
      if (!c.empty()) c += "&";
      c += (val ? "" : "!") + std::to_string(v);
    }
    out += c.empty() ? "t" : c;
  }
  return out;
}

class LabelParser {
 public:
  LabelParser(std::string_view text, bdd::Store& store) : text_(text), store_(store) {}

  bdd::Bdd parse() {
    bdd::Bdd r = disj();
    skip();
    if (pos_ != text_.size()) throw SyntaxError("trailing characters in HOA label", 0, pos_ + 1);
    return r;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bdd::Bdd disj() {
    bdd::Bdd r = conj();
    while (eat('|')) r |= conj();
    return r;
  }
  bdd::Bdd conj() {
    bdd::Bdd r = unary();
    while (eat('&')) r &= unary();
    return r;
  }
  bdd::Bdd unary() {
    if (eat('!')) return !unary();
    if (eat('(')) {
      bdd::Bdd r = disj();
      if (!eat(')')) throw SyntaxError("expected ')' in HOA label", 0, pos_ + 1);
      return r;
    }
    skip();
    if (eat('t')) return store_.bdd_true();
    if (eat('f')) return store_.bdd_false();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError("expected an AP index in HOA label", 0, pos_ + 1);
    const auto v = static_cast<bdd::Var>(std::stoul(std::string(text_.substr(start, pos_ - start))));
    if (v >= store_.var_count()) throw SyntaxError("AP index out of range in HOA label", 0, start + 1);
    return store_.var(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bdd::Store& store_;
};

std::string strip_comments(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "/*") == 0) {
      const std::size_t end = text.find("*/", i + 2);
      if (end == std::string::npos) throw SyntaxError("unterminated HOA comment", 0, i + 1);
      i = end + 1;
      continue;
    }
    out += text[i];
  }
  return out;
}

std::vector<std::string> split_quoted(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '"') continue;
    const std::size_t end = s.find('"', i + 1);
    if (end == std::string::npos) throw SyntaxError("unterminated string in HOA header", 0, i + 1);
    out.push_back(s.substr(i + 1, end - i - 1));
    i = end;
  }
  return out;
}

}  // namespace

std::string export_hoa(const Dwa& a, const std::string& name, const std::vector<std::string>& comments) {
  std::ostringstream out;
  out << "HOA: v1\n";
  if (!name.empty()) out << "name: \"" << name << "\"\n";
  for (const auto& c : comments) out << "/* " << c << " */\n";
  out << "States: " << a.size() << "\n";
  out << "Start: " << a.initial << "\n";
  out << "AP: " << a.alphabet.size();
  for (const auto& ap : a.alphabet.atoms()) out << " \"" << ap << "\"";
  out << "\n";
  out << "acc-name: Buchi\n";
  out << "Acceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels trans-acc\n";
  out << "properties: deterministic complete weak\n";
  out << "--BODY--\n";
  for (StateId q = 0; q < a.size(); ++q) {
    out << "State: " << q << "\n";
    for (const auto& e : a.edges[q]) {
      out << "[" << hoa_label(a, e.guard) << "] " << e.dst << (a.accepting[q] ? " {0}" : "") << "\n";
    }
  }
  out << "--END--\n";
  return out.str();
}

Dwa parse_hoa(const std::string& raw) {
  const std::string text = strip_comments(raw);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> states;
  std::optional<StateId> start;
  std::vector<std::string> aps;
  bool have_ap = false;
  bool body = false;
  bool ended = false;
  Dwa a;
  std::optional<StateId> current;
  std::vector<char> marked;
  auto err = [&](const std::string& m) { throw SyntaxError("HOA: " + m, lineno, 1); };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = line;
    t.erase(0, t.find_first_not_of(" \t\r"));
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    if (t.empty()) continue;
    if (!body) {
      if (t == "--BODY--") {
        if (!states || !start || !have_ap) err("header needs States, Start and AP");
        a.alphabet = Alphabet(aps);
        a.store = make_letter_store(a.alphabet);
        for (std::size_t i = 0; i < *states; ++i) a.add_state(false);
        marked.assign(*states, 0);
        a.initial = *start;
        if (*start >= *states) err("start state out of range");
        body = true;
        continue;
      }
      const std::size_t colon = t.find(':');
      if (colon == std::string::npos) err("malformed header line");
      const std::string key = t.substr(0, colon);
      const std::string value = t.substr(colon + 1);
      if (key == "States") {
        states = std::stoul(value);
      } else if (key == "Start") {
        start = static_cast<StateId>(std::stoul(value));
      } else if (key == "AP") {
        aps = split_quoted(value);
        if (aps.size() != std::stoul(value)) err("AP count does not match the names");
        have_ap = true;
      } else if (key == "Acceptance") {
        std::string v = value;
        v.erase(std::remove_if(v.begin(), v.end(), ::isspace), v.end());
        if (v != "1Inf(0)") err("only 'Acceptance: 1 Inf(0)' is supported");
      }
      continue;
    }
    if (t == "--END--") {
      ended = true;
      break;
    }
    if (t.rfind("State:", 0) == 0) {
      std::istringstream ws(t.substr(6));
      std::size_t q;
      if (!(ws >> q) || q >= a.size()) err("bad state id");
      current = static_cast<StateId>(q);
      if (t.find('{') != std::string::npos) marked[q] = 1;
      continue;
    }
    if (!current) err("edge before any State:");
    if (t.front() != '[') err("implicit labels are not supported");
    const std::size_t close = t.find(']');
    if (close == std::string::npos) err("unterminated label");
    bdd::Bdd g = LabelParser(std::string_view(t).substr(1, close - 1), *a.store).parse();
    std::istringstream rest(t.substr(close + 1));
    std::size_t dst;
    if (!(rest >> dst) || dst >= a.size()) err("bad edge destination");
    if (t.find('{', close) != std::string::npos) marked[*current] = 1;
    a.add_edge(*current, g, static_cast<StateId>(dst));
  }
  if (!ended) err("missing --END--");
  for (StateId q = 0; q < a.size(); ++q) a.accepting[q] = marked[q];
  return a;
}

}  // namespace oblsynth
