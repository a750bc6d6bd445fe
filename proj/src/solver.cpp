#include "lsv/solver.hpp"

#include <algorithm>
#include <sstream>

#include "lsv/parser.hpp"
#include "lsv/printer.hpp"

namespace lsv {

TermPtr simplifyTerm(const TermPtr &t) {
  const auto *a = as<Arith>(t);
  if (!a)
    return t;
  TermPtr l = simplifyTerm(a->lhs);
  TermPtr r = simplifyTerm(a->rhs);
  const auto *li = as<IntConst>(l);
  const auto *ri = as<IntConst>(r);
  if (li && ri) {
    switch (a->op) {
    case ArithKind::Add:
      return mkIntConst(li->value + ri->value);
    case ArithKind::Sub:
      return mkIntConst(li->value - ri->value);
    case ArithKind::Mul:
      return mkIntConst(li->value * ri->value);
    }
  }
  if (l == a->lhs && r == a->rhs)
    return t;
  return mkArith(a->op, std::move(l), std::move(r));
}

namespace {

Update normalizeUpdate(const Update &u) {
  Update n = u.normalized();
  for (auto &e : n.elems)
    e.value = simplifyTerm(e.value);
  return n;
}

FormulaPtr simplifyOnce(const FormulaPtr &f) {
  if (const auto *x = as<AtomF>(f)) {
    TermPtr l = simplifyTerm(x->lhs);
    TermPtr r = simplifyTerm(x->rhs);
    const auto *li = as<IntConst>(l);
    const auto *ri = as<IntConst>(r);
    if (li && ri) {
      bool v = x->rel == RelOp::Eq   ? li->value == ri->value
               : x->rel == RelOp::Lt ? li->value < ri->value
                                     : li->value <= ri->value;
      return v ? mkTrue() : mkFalse();
    }
    const auto *lb = as<BoolConst>(l);
    const auto *rb = as<BoolConst>(r);
    if (lb && rb && x->rel == RelOp::Eq)
      return lb->value == rb->value ? mkTrue() : mkFalse();
    if (equal(l, r))
      return x->rel == RelOp::Lt ? mkFalse() : mkTrue();
    return mkAtom(x->rel, std::move(l), std::move(r));
  }
  if (const auto *x = as<NotF>(f)) {
    FormulaPtr s = simplifyOnce(x->f);
    if (as<TrueFm>(s))
      return mkFalse();
    if (as<FalseFm>(s))
      return mkTrue();
    if (const auto *n = as<NotF>(s))
      return n->f;
    // !(t = TRUE) is t = FALSE for boolean-sorted t, and vice versa
    if (const auto *a = as<AtomF>(s); a && a->rel == RelOp::Eq)
      if (const auto *bc = as<BoolConst>(a->rhs))
        return mkAtom(RelOp::Eq, a->lhs, mkBoolConst(!bc->value));
    return mkNot(std::move(s));
  }
  if (const auto *x = as<AndF>(f)) {
    FormulaPtr l = simplifyOnce(x->lhs);
    FormulaPtr r = simplifyOnce(x->rhs);
    if (as<FalseFm>(l) || as<FalseFm>(r))
      return mkFalse();
    if (as<TrueFm>(l))
      return r;
    if (as<TrueFm>(r))
      return l;
    return mkAnd(std::move(l), std::move(r));
  }
  if (const auto *x = as<OrF>(f)) {
    FormulaPtr l = simplifyOnce(x->lhs);
    FormulaPtr r = simplifyOnce(x->rhs);
    if (as<TrueFm>(l) || as<TrueFm>(r))
      return mkTrue();
    if (as<FalseFm>(l))
      return r;
    if (as<FalseFm>(r))
      return l;
    return mkOr(std::move(l), std::move(r));
  }
  if (const auto *x = as<ImpF>(f)) {
    FormulaPtr l = simplifyOnce(x->lhs);
    FormulaPtr r = simplifyOnce(x->rhs);
    if (as<FalseFm>(l) || as<TrueFm>(r))
      return mkTrue();
    if (as<TrueFm>(l))
      return r;
    if (as<FalseFm>(r))
      return simplifyOnce(mkNot(std::move(l)));
    return mkImp(std::move(l), std::move(r));
  }
  if (const auto *x = as<BoxF>(f)) {
    if (x->program.empty())
      return simplifyOnce(x->post);
    FormulaPtr post = simplifyOnce(x->post);
    if (post == x->post)
      return f;
    return mkBox(x->program, std::move(post));
  }
  if (const auto *x = as<UpdAppF>(f)) {
    Update u = normalizeUpdate(x->update);
    if (const auto *b = as<BoxF>(x->target)) {
      if (b->program.empty())
        return simplifyOnce(applyUpdate(u, b->post));
      return mkUpdApp(std::move(u), mkBox(b->program, simplifyOnce(b->post)));
    }
    // modality-free or mixed target: substitute; updates re-pend in front
    // of any inner boxes and the recursion cleans those up
    return simplifyOnce(applyUpdate(u, x->target));
  }
  return f; // true / false
}

} // namespace

FormulaPtr simplify(const FormulaPtr &f) {
  FormulaPtr cur = f;
  for (int iter = 0; iter < 8; ++iter) {
    FormulaPtr next = simplifyOnce(cur);
    if (equal(next, cur))
      return next;
    cur = next;
  }
  return cur;
}

Sequent simplifySequent(const Sequent &s) {
  Sequent out;
  for (const auto &f : s.antecedent) {
    FormulaPtr g = simplify(f);
    if (as<TrueFm>(g))
      continue;
    bool dup = false;
    for (const auto &h : out.antecedent)
      dup = dup || equal(g, h);
    if (!dup)
      out.antecedent.push_back(std::move(g));
  }
  for (const auto &f : s.succedent) {
    FormulaPtr g = simplify(f);
    if (as<FalseFm>(g))
      continue;
    bool dup = false;
    for (const auto &h : out.succedent)
      dup = dup || equal(g, h);
    if (!dup)
      out.succedent.push_back(std::move(g));
  }
  return out;
}

bool syntacticallyClosed(const Sequent &s) {
  for (const auto &f : s.antecedent)
    if (as<FalseFm>(f))
      return true;
  for (const auto &f : s.succedent)
    if (as<TrueFm>(f))
      return true;
  for (const auto &a : s.antecedent)
    for (const auto &b : s.succedent)
      if (equal(a, b))
        return true;
  return false;
}

std::string closureToString(const ClosureResult &r) {
  std::ostringstream os;
  switch (r.status) {
  case ClosureResult::Status::ClosedValid:
    os << "closed-valid";
    break;
  case ClosureResult::Status::Open:
    os << "open";
    break;
  case ClosureResult::Status::Refuted:
    os << "refuted";
    break;
  }
  switch (r.method) {
  case ClosureResult::Method::Syntactic:
    os << " (syntactic)";
    break;
  case ClosureResult::Method::Bounded:
    os << " (bounded " << r.bound << ")";
    break;
  case ClosureResult::Method::External:
    os << " (external)";
    break;
  }
  if (!r.counterexample.empty()) {
    os << " {";
    bool first = true;
    for (const auto &[k, v] : r.counterexample) {
      if (!first)
        os << ", ";
      first = false;
      os << k << "=" << valueToString(v);
    }
    os << "}";
  }
  if (!r.note.empty())
    os << " [" << r.note << "]";
  return os.str();
}

// --- symbol collection -------------------------------------------------------

namespace {

void collectTermSymbols(const TermPtr &t, std::set<std::string> &out) {
  if (!t)
    return;
  if (const auto *v = as<ProgVar>(t)) {
    out.insert(v->name);
    return;
  }
  if (const auto *c = as<FreshConst>(t)) {
    out.insert(c->name);
    return;
  }
  if (const auto *a = as<Arith>(t)) {
    collectTermSymbols(a->lhs, out);
    collectTermSymbols(a->rhs, out);
  }
}

void collectSymbols(const FormulaPtr &f, std::set<std::string> &out) {
  if (!f)
    return;
  if (const auto *x = as<AtomF>(f)) {
    collectTermSymbols(x->lhs, out);
    collectTermSymbols(x->rhs, out);
  } else if (const auto *x = as<NotF>(f)) {
    collectSymbols(x->f, out);
  } else if (const auto *x = as<AndF>(f)) {
    collectSymbols(x->lhs, out);
    collectSymbols(x->rhs, out);
  } else if (const auto *x = as<OrF>(f)) {
    collectSymbols(x->lhs, out);
    collectSymbols(x->rhs, out);
  } else if (const auto *x = as<ImpF>(f)) {
    collectSymbols(x->lhs, out);
    collectSymbols(x->rhs, out);
  } else if (const auto *x = as<UpdAppF>(f)) {
    for (const auto &e : x->update.elems)
      collectTermSymbols(e.value, out);
    collectSymbols(x->target, out);
  }
  // boxes: handled by callers; bounded checking requires modality-freedom
}

} // namespace

SortEnv sequentSymbolSorts(const Sequent &s) {
  std::vector<FormulaPtr> fs = s.antecedent;
  fs.insert(fs.end(), s.succedent.begin(), s.succedent.end());
  return inferSorts(StmtList{}, fs);
}

bool evalSequent(const Sequent &s, const std::map<std::string, Value> &env) {
  for (const auto &f : s.antecedent)
    if (!evalFormula(f, env))
      return true; // antecedent false: sequent holds
  for (const auto &f : s.succedent)
    if (evalFormula(f, env))
      return true;
  return false;
}

ClosureResult boundedValid(const Sequent &s, const SolverOptions &opts) {
  ClosureResult res;
  res.method = ClosureResult::Method::Bounded;
  res.bound = opts.bound;

  for (const auto &f : s.antecedent)
    if (containsBox(f)) {
      res.status = ClosureResult::Status::Open;
      res.note = "modality present";
      return res;
    }
  for (const auto &f : s.succedent)
    if (containsBox(f)) {
      res.status = ClosureResult::Status::Open;
      res.note = "modality present";
      return res;
    }

  std::set<std::string> symbols;
  for (const auto &f : s.antecedent)
    collectSymbols(f, symbols);
  for (const auto &f : s.succedent)
    collectSymbols(f, symbols);

  SortEnv sorts = sequentSymbolSorts(s);
  std::vector<std::string> names(symbols.begin(), symbols.end());
  std::vector<Sort> vsorts;
  for (const auto &n : names) {
    auto it = sorts.find(n);
    vsorts.push_back(it == sorts.end() ? Sort::Int : it->second);
  }

  const std::int64_t span = 2 * static_cast<std::int64_t>(opts.bound) + 1;
  double total = 1;
  for (Sort so : vsorts)
    total *= (so == Sort::Int ? static_cast<double>(span) : 2.0);
  if (total > static_cast<double>(opts.budget)) {
    res.status = ClosureResult::Status::Open;
    res.note = "assignment budget exceeded";
    return res;
  }

  // lexicographic enumeration by symbol name, values ascending: the first
  // counterexample found is the least one
  std::vector<std::int64_t> idx(names.size(), 0);
  try {
    for (;;) {
      std::map<std::string, Value> env;
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (vsorts[k] == Sort::Int)
          env[names[k]] = idx[k] - opts.bound;
        else
          env[names[k]] = idx[k] != 0;
      }
      if (!evalSequent(s, env)) {
        res.status = ClosureResult::Status::Refuted;
        res.counterexample = std::move(env);
        return res;
      }
      std::size_t k = names.size();
      for (; k-- > 0;) {
        std::int64_t lim = vsorts[k] == Sort::Int ? span : 2;
        if (++idx[k] < lim)
          break;
        idx[k] = 0;
        if (k == 0) {
          k = names.size() + 1; // odometer wrapped: done
          break;
        }
      }
      if (names.empty() || k == names.size() + 1)
        break;
    }
  } catch (const EvalError &e) {
    res.status = ClosureResult::Status::Open;
    res.note = std::string("evaluation error: ") + e.what();
    return res;
  }
  res.status = ClosureResult::Status::ClosedValid;
  return res;
}

// --- SMT-LIB export ----------------------------------------------------------

namespace {

void smtTerm(std::ostream &os, const TermPtr &t) {
  if (const auto *x = as<IntConst>(t)) {
    if (x->value < 0)
      os << "(- " << -x->value << ")";
    else
      os << x->value;
  } else if (const auto *x = as<BoolConst>(t)) {
    os << (x->value ? "true" : "false");
  } else if (const auto *x = as<ProgVar>(t)) {
    os << "|" << x->name << "|";
  } else if (const auto *x = as<FreshConst>(t)) {
    os << "|" << x->name << "|";
  } else {
    const auto *ar = as<Arith>(t);
    os << "("
       << (ar->op == ArithKind::Add ? "+" : ar->op == ArithKind::Sub ? "-" : "*")
       << " ";
    smtTerm(os, ar->lhs);
    os << " ";
    smtTerm(os, ar->rhs);
    os << ")";
  }
}

void smtFormula(std::ostream &os, const FormulaPtr &f) {
  if (const auto *x = as<AtomF>(f)) {
    os << "(" << (x->rel == RelOp::Eq ? "=" : x->rel == RelOp::Lt ? "<" : "<=")
       << " ";
    smtTerm(os, x->lhs);
    os << " ";
    smtTerm(os, x->rhs);
    os << ")";
  } else if (const auto *x = as<NotF>(f)) {
    os << "(not ";
    smtFormula(os, x->f);
    os << ")";
  } else if (const auto *x = as<AndF>(f)) {
    os << "(and ";
    smtFormula(os, x->lhs);
    os << " ";
    smtFormula(os, x->rhs);
    os << ")";
  } else if (const auto *x = as<OrF>(f)) {
    os << "(or ";
    smtFormula(os, x->lhs);
    os << " ";
    smtFormula(os, x->rhs);
    os << ")";
  } else if (const auto *x = as<ImpF>(f)) {
    os << "(=> ";
    smtFormula(os, x->lhs);
    os << " ";
    smtFormula(os, x->rhs);
    os << ")";
  } else if (as<TrueFm>(f)) {
    os << "true";
  } else if (as<FalseFm>(f)) {
    os << "false";
  } else if (const auto *x = as<UpdAppF>(f)) {
    smtFormula(os, applyUpdate(x->update, x->target));
  } else {
    throw std::logic_error("modality in SMT export");
  }
}

} // namespace

std::string emitSMT(const Sequent &s) {
  std::set<std::string> symbols;
  for (const auto &f : s.antecedent)
    collectSymbols(f, symbols);
  for (const auto &f : s.succedent)
    collectSymbols(f, symbols);
  SortEnv sorts = sequentSymbolSorts(s);

  std::ostringstream os;
  os << "; sequent: " << prettyPrint(s) << "\n";
  os << "; unsat <=> the sequent is valid\n";
  os << "(set-logic ALL)\n";
  for (const auto &name : symbols) {
    auto it = sorts.find(name);
    Sort so = it == sorts.end() ? Sort::Int : it->second;
    os << "(declare-const |" << name << "| " << (so == Sort::Int ? "Int" : "Bool")
       << ")\n";
  }
  os << "(assert (not (=> ";
  if (s.antecedent.empty()) {
    os << "true";
  } else {
    os << "(and";
    for (const auto &f : s.antecedent) {
      os << " ";
      smtFormula(os, f);
    }
    os << ")";
  }
  os << " ";
  if (s.succedent.empty()) {
    os << "false";
  } else {
    os << "(or";
    for (const auto &f : s.succedent) {
      os << " ";
      smtFormula(os, f);
    }
    os << ")";
  }
  os << ")))\n(check-sat)\n";
  return os.str();
}

} // namespace lsv
