#include "lsv/interp.hpp"

#include <sstream>

namespace lsv {

std::string valueToString(const Value &v) {
  if (const auto *b = std::get_if<bool>(&v))
    return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v));
}

Sort sortOfValue(const Value &v) {
  return std::holds_alternative<bool>(v) ? Sort::Bool : Sort::Int;
}

void ConcreteState::declare(const std::string &name, Value v) {
  auto &top = scopes.back();
  if (top.count(name))
    throw EvalError("redeclaration of '" + name + "'");
  top.emplace(name, std::move(v));
}

void ConcreteState::assign(const std::string &name, Value v) {
  for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
    auto f = it->find(name);
    if (f != it->end()) {
      if (f->second.index() != v.index())
        throw EvalError("sort mismatch assigning to '" + name + "'");
      f->second = std::move(v);
      return;
    }
  }
  throw EvalError("undeclared variable '" + name + "'");
}

const Value *ConcreteState::lookup(const std::string &name) const {
  for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
    auto f = it->find(name);
    if (f != it->end())
      return &f->second;
  }
  return nullptr;
}

Value ConcreteState::get(const std::string &name) const {
  const Value *v = lookup(name);
  if (!v)
    throw EvalError("undeclared variable '" + name + "'");
  return *v;
}

std::map<std::string, Value> ConcreteState::flatten() const {
  std::map<std::string, Value> out;
  for (const auto &sc : scopes)
    for (const auto &[k, v] : sc)
      out[k] = v; // inner scopes override
  return out;
}

std::string outcomeToString(const Outcome &o) {
  auto stateStr = [&] {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto &[k, v] : o.state.flatten()) {
      if (!first)
        os << ", ";
      first = false;
      os << k << "=" << valueToString(v);
    }
    os << "}";
    return os.str();
  };
  switch (o.kind) {
  case Outcome::Kind::Normal:
    return "normal " + stateStr();
  case Outcome::Kind::Break:
    return (o.label ? "break(" + *o.label + ") " : "break ") + stateStr();
  case Outcome::Kind::Continue:
    return (o.label ? "continue(" + *o.label + ") " : "continue ") + stateStr();
  case Outcome::Kind::Exception:
    return "exception(" + valueToString(*o.thrown) + ") " + stateStr();
  case Outcome::Kind::FuelExhausted:
    return "fuel-exhausted";
  }
  return "?";
}

namespace {

struct FuelOut {};

struct Signal {
  enum class Kind { None, Break, Continue, Exception };
  Kind kind = Kind::None;
  std::optional<std::string> label;
  std::optional<Value> value;

  static Signal none() { return {}; }
  bool isNone() const { return kind == Kind::None; }
};

struct ScopeGuard {
  ConcreteState &st;
  explicit ScopeGuard(ConcreteState &s) : st(s) { st.pushScope(); }
  ~ScopeGuard() { st.popScope(); }
};

struct Exec {
  ConcreteState st;
  std::int64_t fuel;

  void tick() {
    if (--fuel < 0)
      throw FuelOut{};
  }

  std::int64_t evalInt(const ExprPtr &e) {
    Value v = eval(e);
    if (const auto *i = std::get_if<std::int64_t>(&v))
      return *i;
    throw EvalError("integer expression expected");
  }

  bool evalBool(const ExprPtr &e) {
    Value v = eval(e);
    if (const auto *b = std::get_if<bool>(&v))
      return *b;
    throw EvalError("boolean expression expected");
  }

  Value eval(const ExprPtr &e) {
    if (const auto *x = as<IntLit>(e))
      return x->value;
    if (const auto *x = as<BoolLit>(e))
      return x->value;
    if (const auto *x = as<VarRef>(e))
      return st.get(x->name);
    if (const auto *x = as<Unary>(e)) {
      if (x->op == UnOp::Neg)
        return -evalInt(x->arg);
      return !evalBool(x->arg);
    }
    const auto *x = as<Binary>(e);
    switch (x->op) {
    case BinOp::Add:
      return evalInt(x->lhs) + evalInt(x->rhs);
    case BinOp::Sub:
      return evalInt(x->lhs) - evalInt(x->rhs);
    case BinOp::Mul:
      return evalInt(x->lhs) * evalInt(x->rhs);
    case BinOp::Lt:
      return evalInt(x->lhs) < evalInt(x->rhs);
    case BinOp::Le:
      return evalInt(x->lhs) <= evalInt(x->rhs);
    case BinOp::Gt:
      return evalInt(x->lhs) > evalInt(x->rhs);
    case BinOp::Ge:
      return evalInt(x->lhs) >= evalInt(x->rhs);
    case BinOp::And:
      return evalBool(x->lhs) && evalBool(x->rhs);
    case BinOp::Or:
      return evalBool(x->lhs) || evalBool(x->rhs);
    case BinOp::Eq:
    case BinOp::Ne: {
      Value l = eval(x->lhs);
      Value r = eval(x->rhs);
      if (l.index() != r.index())
        throw EvalError("'=='/'!=' operands of different sorts");
      bool eq = l == r;
      return x->op == BinOp::Eq ? eq : !eq;
    }
    }
    throw EvalError("unreachable");
  }

  void execUpdateExpr(const UpdateExpr &e) {
    if (const auto *a = std::get_if<UpdAssign>(&e.node)) {
      st.assign(a->target, eval(a->rhs));
    } else if (const auto *i = std::get_if<UpdIncr>(&e.node)) {
      Value v = st.get(i->target);
      if (!std::holds_alternative<std::int64_t>(v))
        throw EvalError("'++' target must be int");
      st.assign(i->target, std::get<std::int64_t>(v) + 1);
    } else {
      const auto &d = std::get<UpdDecr>(e.node);
      Value v = st.get(d.target);
      if (!std::holds_alternative<std::int64_t>(v))
        throw EvalError("'--' target must be int");
      st.assign(d.target, std::get<std::int64_t>(v) - 1);
    }
  }

  Signal execSeq(const StmtList &ss) {
    for (const auto &s : ss) {
      Signal sig = exec(s);
      if (!sig.isNone())
        return sig;
    }
    return Signal::none();
  }

  static bool matches(const std::optional<std::string> &label,
                      const std::vector<std::string> &labels) {
    if (!label)
      return true; // unlabeled signals bind to the innermost loop
    for (const auto &l : labels)
      if (l == *label)
        return true;
    return false;
  }

  Signal execLoop(const StmtPtr &loop, const std::vector<std::string> &labels) {
    if (const auto *w = as<WhileStmt>(loop)) {
      for (;;) {
        tick();
        if (!evalBool(w->cond))
          return Signal::none();
        Signal sig = exec(w->body);
        if (sig.kind == Signal::Kind::Break && matches(sig.label, labels))
          return Signal::none();
        if (sig.kind == Signal::Kind::Continue && matches(sig.label, labels))
          continue;
        if (!sig.isNone())
          return sig;
      }
    }
    const auto *f = as<ForStmt>(loop);
    ScopeGuard scope(st);
    if (f->init.kind == ForInit::Kind::Decls) {
      for (const auto &d : f->init.decls)
        st.declare(d.name, eval(d.init));
    } else if (f->init.kind == ForInit::Kind::Exprs) {
      for (const auto &e : f->init.exprs)
        execUpdateExpr(e);
    }
    for (;;) {
      tick();
      if (f->guard && !evalBool(f->guard))
        return Signal::none();
      Signal sig = exec(f->body);
      if (sig.kind == Signal::Kind::Break && matches(sig.label, labels))
        return Signal::none();
      bool doUpdate = sig.isNone() || (sig.kind == Signal::Kind::Continue &&
                                       matches(sig.label, labels));
      if (!doUpdate)
        return sig;
      for (const auto &e : f->update)
        execUpdateExpr(e);
    }
  }

  Signal exec(const StmtPtr &s) {
    tick();
    if (std::get_if<SkipStmt>(&s->node))
      return Signal::none();
    if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
      Value v = eval(x->init);
      if (sortOfValue(v) != x->sort)
        throw EvalError("initializer sort mismatch for '" + x->name + "'");
      st.declare(x->name, std::move(v));
      return Signal::none();
    }
    if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
      st.assign(x->target, eval(x->rhs));
      return Signal::none();
    }
    if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
      execUpdateExpr(x->expr);
      return Signal::none();
    }
    if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
      ScopeGuard scope(st);
      return execSeq(x->body);
    }
    if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
      // collect the full label prefix down to the labeled statement
      std::vector<std::string> labels = x->labels;
      StmtPtr body = x->body;
      while (const auto *inner = as<LabeledStmt>(body)) {
        labels.insert(labels.end(), inner->labels.begin(), inner->labels.end());
        body = inner->body;
      }
      if (is<WhileStmt>(body) || is<ForStmt>(body))
        return execLoop(body, labels);
      Signal sig = exec(body);
      if (sig.kind == Signal::Kind::Break && sig.label &&
          matches(sig.label, labels))
        return Signal::none(); // the labeled statement completes normally
      if (sig.kind == Signal::Kind::Continue && sig.label &&
          matches(sig.label, labels)) {
        // becomes an unlabeled continue, so it can reach an enclosing loop
        // or loop scope
        sig.label.reset();
        return sig;
      }
      return sig;
    }
    if (const auto *x = std::get_if<IfStmt>(&s->node)) {
      if (evalBool(x->cond))
        return exec(x->thenBranch);
      if (x->elseBranch)
        return exec(x->elseBranch);
      return Signal::none();
    }
    if (is<WhileStmt>(s) || is<ForStmt>(s))
      return execLoop(s, {});
    if (const auto *x = std::get_if<BreakStmt>(&s->node)) {
      Signal sig;
      sig.kind = Signal::Kind::Break;
      sig.label = x->label;
      return sig;
    }
    if (const auto *x = std::get_if<ContinueStmt>(&s->node)) {
      Signal sig;
      sig.kind = Signal::Kind::Continue;
      sig.label = x->label;
      return sig;
    }
    if (const auto *x = std::get_if<ThrowStmt>(&s->node)) {
      Signal sig;
      sig.kind = Signal::Kind::Exception;
      sig.value = eval(x->value);
      return sig;
    }
    if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
      Signal sig;
      {
        ScopeGuard scope(st);
        sig = execSeq(x->tryBody);
      }
      if (sig.kind != Signal::Kind::Exception)
        return sig;
      ScopeGuard scope(st);
      st.declare(x->catchVar, *sig.value);
      return execSeq(x->catchBody);
    }
    const auto &x = std::get<LoopScopeStmt>(s->node);
    ScopeGuard scope(st);
    for (const auto &t : x.body) {
      Signal sig = exec(t);
      if (sig.isNone())
        continue;
      if (sig.kind == Signal::Kind::Continue && !sig.label) {
        st.assign(x.index, false); // loop iteration continues: index false
        continue;                  // resume with the next scope statement
      }
      if (sig.kind == Signal::Kind::Break && !sig.label)
        return Signal::none(); // exit the scope, index untouched
      return sig;              // labeled signals and exceptions propagate
    }
    return Signal::none();
  }
};

} // namespace

Outcome run(const StmtList &program, const ConcreteState &init,
            std::int64_t fuel) {
  Exec ex{init, fuel};
  // the program runs in its own scope; scope 0 holds the ambient state
  ex.st.pushScope();
  Outcome out;
  try {
    Signal sig = ex.execSeq(program);
    out.state = std::move(ex.st);
    switch (sig.kind) {
    case Signal::Kind::None:
      out.kind = Outcome::Kind::Normal;
      break;
    case Signal::Kind::Break:
      out.kind = Outcome::Kind::Break;
      out.label = sig.label;
      break;
    case Signal::Kind::Continue:
      out.kind = Outcome::Kind::Continue;
      out.label = sig.label;
      break;
    case Signal::Kind::Exception:
      out.kind = Outcome::Kind::Exception;
      out.thrown = sig.value;
      break;
    }
  } catch (const FuelOut &) {
    out.kind = Outcome::Kind::FuelExhausted;
  }
  return out;
}

// --- equivalence oracle -----------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t &x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d649bb133111ebULL;
  return z ^ (z >> 31);
}

bool sameOutcome(const Outcome &a, const Outcome &b,
                 const std::set<std::string> &vars) {
  if (a.kind != b.kind || a.label != b.label || a.thrown != b.thrown)
    return false;
  auto fa = a.state.flatten();
  auto fb = b.state.flatten();
  for (const auto &v : vars) {
    auto ia = fa.find(v);
    auto ib = fb.find(v);
    if ((ia == fa.end()) != (ib == fb.end()))
      return false;
    if (ia != fa.end() && ia->second != ib->second)
      return false;
  }
  return true;
}

} // namespace

EquivVerdict equivCheck(const StmtList &p1, const StmtList &p2,
                        const std::set<std::string> &vars, const SortEnv &sorts,
                        int domainBound, std::size_t trials, std::uint64_t seed,
                        std::int64_t fuel) {
  EquivVerdict verdict;
  std::vector<std::string> names(vars.begin(), vars.end());
  std::vector<Sort> vsorts;
  for (const auto &n : names) {
    auto it = sorts.find(n);
    vsorts.push_back(it == sorts.end() ? Sort::Int : it->second);
  }

  const std::int64_t span = 2 * static_cast<std::int64_t>(domainBound) + 1;
  double total = 1;
  for (Sort s : vsorts)
    total *= (s == Sort::Int ? static_cast<double>(span) : 2.0);
  bool exhaustive = total <= 10000.0;

  auto checkState = [&](const std::map<std::string, Value> &init) -> bool {
    ConcreteState st(init);
    Outcome o1 = run(p1, st, fuel);
    Outcome o2 = run(p2, st, fuel);
    if (o1.kind == Outcome::Kind::FuelExhausted ||
        o2.kind == Outcome::Kind::FuelExhausted) {
      ++verdict.skippedStates;
      return true;
    }
    ++verdict.testedStates;
    if (sameOutcome(o1, o2, vars))
      return true;
    verdict.equivalent = false;
    verdict.cex =
        Counterexample{init, outcomeToString(o1), outcomeToString(o2)};
    return false;
  };

  if (exhaustive) {
    std::vector<std::int64_t> idx(names.size(), 0);
    for (;;) {
      std::map<std::string, Value> init;
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (vsorts[k] == Sort::Int)
          init[names[k]] = idx[k] - domainBound;
        else
          init[names[k]] = idx[k] != 0;
      }
      if (!checkState(init))
        return verdict;
      // odometer
      std::size_t k = 0;
      for (; k < names.size(); ++k) {
        std::int64_t lim = vsorts[k] == Sort::Int ? span : 2;
        if (++idx[k] < lim)
          break;
        idx[k] = 0;
      }
      if (k == names.size())
        break;
    }
    return verdict;
  }

  std::uint64_t rng = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    std::map<std::string, Value> init;
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::uint64_t r = splitmix64(rng);
      if (vsorts[k] == Sort::Int)
        init[names[k]] =
            static_cast<std::int64_t>(r % static_cast<std::uint64_t>(span)) -
            domainBound;
      else
        init[names[k]] = (r & 1) != 0;
    }
    if (!checkState(init))
      return verdict;
  }
  return verdict;
}

// --- concrete formula evaluation -------------------------------------------

Value evalTerm(const TermPtr &t, const std::map<std::string, Value> &env) {
  if (const auto *x = as<IntConst>(t))
    return x->value;
  if (const auto *x = as<BoolConst>(t))
    return x->value;
  if (const auto *x = as<ProgVar>(t)) {
    auto it = env.find(x->name);
    if (it == env.end())
      throw EvalError("no value for variable '" + x->name + "'");
    return it->second;
  }
  if (const auto *x = as<FreshConst>(t)) {
    auto it = env.find(x->name);
    if (it == env.end())
      throw EvalError("no value for constant '" + x->name + "'");
    return it->second;
  }
  const auto *x = as<Arith>(t);
  Value l = evalTerm(x->lhs, env);
  Value r = evalTerm(x->rhs, env);
  const auto *li = std::get_if<std::int64_t>(&l);
  const auto *ri = std::get_if<std::int64_t>(&r);
  if (!li || !ri)
    throw EvalError("arithmetic on non-integer value");
  switch (x->op) {
  case ArithKind::Add:
    return *li + *ri;
  case ArithKind::Sub:
    return *li - *ri;
  case ArithKind::Mul:
    return *li * *ri;
  }
  throw EvalError("unreachable");
}

bool evalFormula(const FormulaPtr &f, const std::map<std::string, Value> &env) {
  if (const auto *x = as<AtomF>(f)) {
    Value l = evalTerm(x->lhs, env);
    Value r = evalTerm(x->rhs, env);
    if (x->rel == RelOp::Eq) {
      if (l.index() != r.index())
        throw EvalError("'=' on values of different sorts");
      return l == r;
    }
    const auto *li = std::get_if<std::int64_t>(&l);
    const auto *ri = std::get_if<std::int64_t>(&r);
    if (!li || !ri)
      throw EvalError("ordering on non-integer value");
    return x->rel == RelOp::Lt ? *li < *ri : *li <= *ri;
  }
  if (const auto *x = as<NotF>(f))
    return !evalFormula(x->f, env);
  if (const auto *x = as<AndF>(f))
    return evalFormula(x->lhs, env) && evalFormula(x->rhs, env);
  if (const auto *x = as<OrF>(f))
    return evalFormula(x->lhs, env) || evalFormula(x->rhs, env);
  if (const auto *x = as<ImpF>(f))
    return !evalFormula(x->lhs, env) || evalFormula(x->rhs, env);
  if (as<TrueFm>(f))
    return true;
  if (as<FalseFm>(f))
    return false;
  if (const auto *x = as<UpdAppF>(f)) {
    std::map<std::string, Value> next = env;
    for (const auto &[var, term] : x->update.bindingMap())
      next[var] = evalTerm(term, env); // simultaneous: all in the pre-state
    return evalFormula(x->target, next);
  }
  throw EvalError("modality in concrete formula evaluation");
}

BoxCheck checkBoxSemantics(const StmtList &program, const FormulaPtr &post,
                           const ConcreteState &init, std::int64_t fuel) {
  Outcome o = run(program, init, fuel);
  switch (o.kind) {
  case Outcome::Kind::Normal:
    try {
      return evalFormula(post, o.state.flatten()) ? BoxCheck::Holds
                                                  : BoxCheck::Fails;
    } catch (const EvalError &) {
      return BoxCheck::Unknown;
    }
  case Outcome::Kind::Exception:
    return BoxCheck::Holds; // partial correctness: abrupt termination is fine
  case Outcome::Kind::FuelExhausted:
    return BoxCheck::Unknown;
  default:
    return BoxCheck::Unknown; // stray break/continue: invalid program
  }
}

BoxCheck checkBoxSemantics(const FormulaPtr &boxFormula,
                           const ConcreteState &init, std::int64_t fuel) {
  const auto *b = as<BoxF>(boxFormula);
  if (!b)
    throw EvalError("box formula expected");
  return checkBoxSemantics(b->program, b->post, init, fuel);
}

} // namespace lsv
