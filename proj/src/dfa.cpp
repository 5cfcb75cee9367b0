#include "oblsynth/dfa.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace oblsynth {

namespace {

bool is_boolean(LtlfKind k) {
  return k == LtlfKind::True || k == LtlfKind::False || k == LtlfKind::Not || k == LtlfKind::And ||
         k == LtlfKind::Or;
}

}  // namespace

ProgressionSession::ProgressionSession(const LtlfFormula& phi, const Alphabet& alphabet)
    : phi_(phi), alphabet_(alphabet) {
  const auto atoms = phi.atoms();
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (!atoms.count(alphabet.atom(i))) continue;
    const bdd::Var v = store_.new_var(alphabet.atom(i), bdd::VarRole::LetterAtom);
    letter_vars_.push_back(v);
    letter_atom_.push_back(i);
    letter_of_atom_[alphabet.atom(i)] = v;
  }
  for (const auto& a : atoms) {
    if (!alphabet.contains(a)) throw UndeclaredAtomError(a);
  }
  end_var_ = store_.new_var("END", bdd::VarRole::Auxiliary);
  first_state_var_ = end_var_;
  var_kind_.push_back(LtlfKind::True);  // END, handled separately
  closure_var(phi);
  for (const auto& [f, v] : closure_) substitution_[v] = prog(f);
  substitution_[end_var_] = store_.bdd_false();
}

bdd::Var ProgressionSession::closure_var(const LtlfFormula& f) {
  for (const auto& c : f.children()) closure_var(c);
  if (is_boolean(f.kind())) return 0;
  auto it = closure_.find(f);
  if (it != closure_.end()) return it->second;
  const bdd::Var v = store_.new_var("[" + oblsynth::to_string(f) + "]", bdd::VarRole::Auxiliary);
  var_kind_.push_back(f.kind());
  closure_.emplace(f, v);
  return v;
}

bdd::Bdd ProgressionSession::encode(const LtlfFormula& f) {
  auto it = encode_memo_.find(f);
  if (it != encode_memo_.end()) return it->second;
  bdd::Bdd r;
  switch (f.kind()) {
    case LtlfKind::True: r = store_.bdd_true(); break;
    case LtlfKind::False: r = store_.bdd_false(); break;
    case LtlfKind::Not: r = !encode(f.child(0)); break;
    case LtlfKind::And: r = encode(f.child(0)) & encode(f.child(1)); break;
    case LtlfKind::Or: r = encode(f.child(0)) | encode(f.child(1)); break;
    default: {
      auto c = closure_.find(f);
      if (c == closure_.end()) throw std::invalid_argument("formula outside the session closure: " + oblsynth::to_string(f));
      r = store_.var(c->second);
    }
  }
  encode_memo_.emplace(f, r);
  return r;
}

bdd::Bdd ProgressionSession::prog(const LtlfFormula& f) {
  auto it = prog_memo_.find(f);
  if (it != prog_memo_.end()) return it->second;
  bdd::Bdd r;
  const bdd::Bdd end = store_.var(end_var_);
  switch (f.kind()) {
    case LtlfKind::True: r = store_.bdd_true(); break;
    case LtlfKind::False: r = store_.bdd_false(); break;
    case LtlfKind::Atom: r = store_.var(letter_of_atom_.at(f.name())); break;
    case LtlfKind::Not: r = !prog(f.child(0)); break;
    case LtlfKind::And: r = prog(f.child(0)) & prog(f.child(1)); break;
    case LtlfKind::Or: r = prog(f.child(0)) | prog(f.child(1)); break;
    case LtlfKind::StrongNext: r = (!end) & encode(f.child(0)); break;
    case LtlfKind::WeakNext: r = end | encode(f.child(0)); break;
    case LtlfKind::Until: r = prog(f.child(1)) | (prog(f.child(0)) & encode(f)); break;
    case LtlfKind::Eventually: r = prog(f.child(0)) | encode(f); break;
    case LtlfKind::Always: r = prog(f.child(0)) & encode(f); break;
  }
  prog_memo_.emplace(f, r);
  return r;
}

bdd::Bdd ProgressionSession::progress_symbolic(const StateFormula& xi) {
  return store_.vector_compose(xi, substitution_);
}

ProgressionSession::StateFormula ProgressionSession::progress(const StateFormula& xi, Letter a) {
  std::vector<bool> values;
  for (const std::size_t i : letter_atom_) values.push_back((a >> i) & 1u);
  return store_.restrict(progress_symbolic(xi), letter_vars_, values);
}

bool ProgressionSession::eps_accepts(const StateFormula& xi) const {
  return store_.eval(xi, [&](bdd::Var v) {
    if (v == end_var_) return true;
    if (v < first_state_var_) return false;
    switch (var_kind_[v - first_state_var_]) {
      case LtlfKind::WeakNext:
      case LtlfKind::Always: return true;
      default: return false;
    }
  });
}

std::vector<std::pair<bdd::Bdd, ProgressionSession::StateFormula>> ProgressionSession::transitions(
    const StateFormula& xi, bdd::Store& letters) {
  const bdd::Bdd succ = progress_symbolic(xi);
  const bdd::Var nletters = static_cast<bdd::Var>(letter_vars_.size());
  auto is_cut = [&](bdd::NodeId n) { return n <= bdd::kTrue || store_.node_var(n) >= nletters; };

  // Letter nodes in level order, so every parent is handled before its children.
  std::vector<bdd::NodeId> inner;
  std::vector<bdd::NodeId> cuts;
  {
    std::vector<bdd::NodeId> stack{succ.id()};
    std::unordered_map<bdd::NodeId, char> seen;
    while (!stack.empty()) {
      const bdd::NodeId n = stack.back();
      stack.pop_back();
      if (!seen.emplace(n, 1).second) continue;
      if (is_cut(n)) {
        cuts.push_back(n);
        continue;
      }
      inner.push_back(n);
      stack.push_back(store_.node_low(n));
      stack.push_back(store_.node_high(n));
    }
  }
  std::stable_sort(inner.begin(), inner.end(),
                   [&](bdd::NodeId a, bdd::NodeId b) { return store_.node_var(a) < store_.node_var(b); });

  std::unordered_map<bdd::NodeId, bdd::Bdd> guard;
  guard.emplace(succ.id(), store_.bdd_true());
  for (const bdd::NodeId n : inner) {
    const bdd::Bdd g = guard.at(n);
    const bdd::Var v = store_.node_var(n);
    const bdd::NodeId lo = store_.node_low(n), hi = store_.node_high(n);
    const bdd::Bdd glo = g & store_.nvar(v);
    const bdd::Bdd ghi = g & store_.var(v);
    for (auto [child, part] : {std::pair{lo, glo}, std::pair{hi, ghi}}) {
      auto it = guard.find(child);
      if (it == guard.end()) {
        guard.emplace(child, part);
      } else {
        it->second |= part;
      }
    }
  }

  std::map<bdd::Var, bdd::Var> to_alphabet;
  for (std::size_t i = 0; i < letter_vars_.size(); ++i) to_alphabet[letter_vars_[i]] = static_cast<bdd::Var>(letter_atom_[i]);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<bdd::Bdd, StateFormula>> out;
  for (const bdd::NodeId c : cuts) {
    out.push_back({letters.import(store_, guard.at(c), to_alphabet), bdd::Bdd(&store_, c)});
  }
  return out;
}

Dfa compile_dfa(const LtlfFormula& phi, const Alphabet& alphabet, std::shared_ptr<bdd::Store> letters,
                const CompileOptions& options) {
  if (!letters) letters = make_letter_store(alphabet);
  ProgressionSession session(phi, alphabet);
  Dfa dfa;
  dfa.store = letters;
  dfa.alphabet = alphabet;

  std::unordered_map<bdd::NodeId, StateId> ids;
  std::vector<bdd::Bdd> formulas;
  auto intern = [&](const bdd::Bdd& xi) {
    auto it = ids.find(xi.id());
    if (it != ids.end()) return it->second;
    if (formulas.size() >= options.max_states) {
      throw StateBudgetError("DFA state budget of " + std::to_string(options.max_states) +
                                 " exceeded (closure size " + std::to_string(session.closure_size()) + ")",
                             session.closure_size());
    }
    const StateId q = dfa.add_state(session.eps_accepts(xi));
    ids.emplace(xi.id(), q);
    formulas.push_back(xi);
    return q;
  };

  dfa.initial = intern(session.initial());
  for (StateId q = 0; q < formulas.size(); ++q) {
    const bdd::Bdd xi = formulas[q];
    for (const auto& [g, succ] : session.transitions(xi, *letters)) dfa.add_edge(q, g, intern(succ));
  }
  return dfa;
}

bool dfa_accepts(const Automaton& dfa, const FiniteTrace& trace) {
  StateId q = dfa.initial;
  for (const Letter a : trace.letters) q = dfa.step(q, a);
  return dfa.accepting[q];
}

template <class A>
A minimize_automaton(const A& input) {
  const A a = trim(input);
  const std::size_t n = a.size();
  if (n == 0) return a;

  struct Pred {
    StateId src;
    std::size_t edge;
  };
  std::vector<std::vector<Pred>> preds(n);
  for (StateId q = 0; q < n; ++q) {
    for (std::size_t i = 0; i < a.edges[q].size(); ++i) preds[a.edges[q][i].dst].push_back({q, i});
  }

  std::vector<std::vector<StateId>> blocks;
  std::vector<std::size_t> block_of(n);
  {
    std::vector<StateId> acc, rej;
    for (StateId q = 0; q < n; ++q) (a.accepting[q] ? acc : rej).push_back(q);
    for (auto* part : {&rej, &acc}) {
      if (part->empty()) continue;
      for (const StateId q : *part) block_of[q] = blocks.size();
      blocks.push_back(*part);
    }
  }
  std::deque<std::size_t> work;
  std::vector<char> queued(blocks.size(), 0);
  if (blocks.size() == 2) {
    const std::size_t smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
    work.push_back(smaller);
    queued[smaller] = 1;
  }

  while (!work.empty()) {
    const std::size_t c = work.front();
    work.pop_front();
    queued[c] = 0;

    // Guard into the splitter, per predecessor state.
    std::unordered_map<StateId, bdd::Bdd> into;
    for (const StateId t : blocks[c]) {
      for (const Pred& p : preds[t]) {
        const bdd::Bdd& g = a.edges[p.src][p.edge].guard;
        auto it = into.find(p.src);
        if (it == into.end()) {
          into.emplace(p.src, g);
        } else {
          it->second |= g;
        }
      }
    }
    std::vector<std::size_t> touched;
    for (const auto& [q, g] : into) touched.push_back(block_of[q]);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    for (const std::size_t b : touched) {
      std::map<bdd::NodeId, std::vector<StateId>> groups;
      for (const StateId q : blocks[b]) {
        auto it = into.find(q);
        groups[it == into.end() ? bdd::kFalse : it->second.id()].push_back(q);
      }
      if (groups.size() < 2) continue;
      auto largest = groups.begin();
      for (auto it = groups.begin(); it != groups.end(); ++it) {
        if (it->second.size() > largest->second.size()) largest = it;
      }
      blocks[b] = largest->second;
      for (auto it = groups.begin(); it != groups.end(); ++it) {
        if (it == largest) continue;
        const std::size_t nb = blocks.size();
        for (const StateId q : it->second) block_of[q] = nb;
        blocks.push_back(it->second);
        queued.push_back(1);
        work.push_back(nb);
      }
    }
  }

  A out;
  out.store = a.store;
  out.alphabet = a.alphabet;
  for (const auto& blk : blocks) out.add_state(a.accepting[blk.front()]);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& e : a.edges[blocks[b].front()]) {
      out.add_edge(static_cast<StateId>(b), e.guard, static_cast<StateId>(block_of[e.dst]));
    }
  }
  out.initial = static_cast<StateId>(block_of[a.initial]);
  return out;
}

template Automaton minimize_automaton(const Automaton&);
template Dfa minimize_automaton(const Dfa&);
template Dwa minimize_automaton(const Dwa&);

Dfa minimize_dfa(const Dfa& dfa) { return canonical_form(minimize_automaton(dfa)); }

DfaClassifier::DfaClassifier(std::vector<Dfa> dfas) : dfas_(std::move(dfas)) {
  for (const auto& d : dfas_) {
    tables_.push_back(d.alphabet.size() <= 10 ? transition_table(d) : std::vector<StateId>{});
  }
}

PrefixClassifier::State DfaClassifier::step(std::size_t component, State state, Letter letter) const {
  const auto& table = tables_[component];
  if (!table.empty()) return table[state * dfas_[component].alphabet.letter_count() + letter];
  return dfas_[component].step(state, letter);
}

DfaClassifier make_classifier(const ObligationFormula& psi, const Alphabet& alphabet) {
  auto letters = make_letter_store(alphabet);
  std::vector<Dfa> dfas;
  for (const auto& c : components(psi)) dfas.push_back(compile_dfa(c.body, alphabet, letters));
  return DfaClassifier(std::move(dfas));
}

}  // namespace oblsynth
