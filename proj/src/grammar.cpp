#include "tqa/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tqa/time.hpp"

namespace tqa::gram {

namespace {

using lex::VerbForm;

// ---------------------------------------------------------------------------
// Tokens.

struct Token {
  enum class Kind { Word, Name, Date, Time, Number };
  Kind kind = Kind::Word;
  std::string text;  // word, name constant, or original date/time spelling
  long number = 0;
  std::size_t pos = 0;
};

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_aux(const std::string& w) {
  return w == "did" || w == "does" || w == "was" || w == "were" ||
         w == "is" || w == "are" || w == "had" || w == "has";
}

bool builtin_word(const std::string& w) {
  return is_aux(w) || w == "a" || w == "an" || w == "the" || w == "who" ||
         w == "what" || w == "which" || w == "when" || w == "on" ||
         w == "at" || w == "for" || w == "ever";
}

std::optional<long> number_word(const std::string& w) {
  static const std::map<std::string, long> kWords = {
      {"one", 1}, {"two", 2},   {"three", 3}, {"four", 4},
      {"five", 5}, {"six", 6},  {"seven", 7}, {"eight", 8},
      {"nine", 9}, {"ten", 10}, {"eleven", 11}, {"twelve", 12}};
  auto it = kWords.find(w);
  if (it == kWords.end()) return std::nullopt;
  return it->second;
}

std::optional<time::Unit> unit_word(const std::string& w) {
  if (auto u = time::unit_from_name(w)) return u;
  if (w.size() > 1 && w.back() == 's')
    return time::unit_from_name(w.substr(0, w.size() - 1));
  return std::nullopt;
}

std::vector<Token> tokenize(const std::string& line, const lex::Lexicon& lx) {
  static const std::string kPunct = ".,?!;:\"'()";
  std::vector<std::string> raw;
  std::istringstream in(line);
  for (std::string t; in >> t;) {
    while (!t.empty() && kPunct.find(t.front()) != std::string::npos)
      t.erase(0, 1);
    while (!t.empty() && kPunct.find(t.back()) != std::string::npos)
      t.pop_back();
    if (!t.empty()) raw.push_back(lower(t));
  }
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    const lex::NameEntry* name = nullptr;
    for (const lex::NameEntry& n : lx.names) {  // longest sequences first
      if (i + n.words.size() <= raw.size() &&
          std::equal(n.words.begin(), n.words.end(), raw.begin() + i)) {
        name = &n;
        break;
      }
    }
    Token t;
    t.pos = out.size();
    if (name) {
      t.kind = Token::Kind::Name;
      t.text = name->constant;
      i += name->words.size();
    } else {
      const std::string& w = raw[i++];
      t.text = w;
      if (time::looks_like_date(w)) {
        t.kind = Token::Kind::Date;
      } else if (time::looks_like_time(w)) {
        t.kind = Token::Kind::Time;
      } else if (!w.empty() && w.size() <= 9 &&
                 std::all_of(w.begin(), w.end(), [](char c) {
                   return std::isdigit(static_cast<unsigned char>(c));
                 })) {
        t.kind = Token::Kind::Number;
        t.number = std::stol(w);
      } else if (auto n = number_word(w)) {
        t.kind = Token::Kind::Number;
        t.number = *n;
      } else {
        t.kind = Token::Kind::Word;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree construction helpers.

TreePtr leaf(std::string label, std::string word, std::size_t pos) {
  auto t = std::make_shared<ParseTree>();
  t->label = std::move(label);
  t->word = std::move(word);
  t->pos = pos;
  return t;
}

TreePtr node(std::string label,
             std::vector<std::pair<Role, TreePtr>> daughters) {
  auto t = std::make_shared<ParseTree>();
  t->label = std::move(label);
  t->daughters = std::move(daughters);
  t->pos = t->daughters.empty() ? 0 : t->daughters.front().second->pos;
  return t;
}

// ---------------------------------------------------------------------------
// Intermediate frame pieces.

struct NpInfo {
  enum class Kind { Name, Exists, Wh, WhBare };
  Kind kind = Kind::Name;
  std::string constant;   // Name
  std::string noun_pred;  // Exists / Wh restriction
  std::size_t pos = 0;
  TreePtr tree;
};

struct PpInfo {
  enum class Kind { At, For };
  Kind kind = Kind::At;
  bool punctual = false;   // "at" as opposed to "on"
  std::string date_text;   // At: original date/time spelling
  time::Unit unit = time::Unit::Day;
  long count = 0;
  std::size_t pos = 0;
  TreePtr tree;
};

struct Core {
  std::string aux;  // empty for declaratives and subject-wh questions
  std::size_t aux_pos = 0;
  NpInfo subject;
  std::string verb_word;
  std::size_t verb_pos = 0;
  std::optional<NpInfo> object;  // semantic object, wh or in place
  std::optional<std::size_t> ever_pos;
};

struct Sentence {
  Core core;
  std::vector<PpInfo> adjuncts;  // surface order
  std::optional<std::size_t> when_pos;
};

// ---------------------------------------------------------------------------
// The fragment parser.

struct Parser {
  const std::vector<Token>& ts;
  const lex::Lexicon& lx;
  std::size_t best = 0;
  std::string best_what = "a question";

  const Token* tok(std::size_t i) const {
    return i < ts.size() ? &ts[i] : nullptr;
  }
  bool word_at(std::size_t i, const char* w) const {
    const Token* t = tok(i);
    return t && t->kind == Token::Kind::Word && t->text == w;
  }
  void want(std::size_t i, const std::string& what) {
    if (i >= best) {
      best = i;
      best_what = what;
    }
  }

  std::optional<std::pair<NpInfo, std::size_t>> np(std::size_t i) {
    const Token* t = tok(i);
    if (!t) {
      want(i, "a noun phrase");
      return std::nullopt;
    }
    if (t->kind == Token::Kind::Name) {
      NpInfo n;
      n.kind = NpInfo::Kind::Name;
      n.constant = t->text;
      n.pos = i;
      n.tree = node("NP", {{Role::Head, leaf("NAME", t->text, i)}});
      return std::make_pair(n, i + 1);
    }
    if (t->kind != Token::Kind::Word) {
      want(i, "a noun phrase");
      return std::nullopt;
    }
    if (t->text == "a" || t->text == "an" || t->text == "the") {
      const Token* nw = tok(i + 1);
      if (!nw || nw->kind != Token::Kind::Word ||
          lx.nouns.find(nw->text) == lx.nouns.end()) {
        want(i + 1, "a noun after '" + t->text + "'");
        return std::nullopt;
      }
      NpInfo n;
      n.kind = NpInfo::Kind::Exists;
      n.noun_pred = lx.nouns.at(nw->text).pred;
      n.pos = i;
      n.tree = node("NP", {{Role::Complement, leaf("DET", t->text, i)},
                           {Role::Head, leaf("N", nw->text, i + 1)}});
      return std::make_pair(n, i + 2);
    }
    if (t->text == "which") {
      const Token* nw = tok(i + 1);
      if (!nw || nw->kind != Token::Kind::Word ||
          lx.nouns.find(nw->text) == lx.nouns.end()) {
        want(i + 1, "a noun after 'which'");
        return std::nullopt;
      }
      NpInfo n;
      n.kind = NpInfo::Kind::Wh;
      n.noun_pred = lx.nouns.at(nw->text).pred;
      n.pos = i;
      n.tree = node("NP", {{Role::Complement, leaf("WH", "which", i)},
                           {Role::Head, leaf("N", nw->text, i + 1)}});
      return std::make_pair(n, i + 2);
    }
    if (t->text == "who" || t->text == "what") {
      NpInfo n;
      n.kind = NpInfo::Kind::WhBare;
      n.pos = i;
      n.tree = node("NP", {{Role::Head, leaf("WH", t->text, i)}});
      return std::make_pair(n, i + 1);
    }
    want(i, "a noun phrase");
    return std::nullopt;
  }

  std::optional<std::pair<PpInfo, std::size_t>> pp(std::size_t i) {
    const Token* p = tok(i);
    if (!p || p->kind != Token::Kind::Word) return std::nullopt;
    if (p->text == "on" || p->text == "at") {
      const Token* d = tok(i + 1);
      bool ok = d && (d->kind == Token::Kind::Date ||
                      (p->text == "at" && d->kind == Token::Kind::Time));
      if (!ok) {
        want(i + 1, p->text == "on" ? "a date after 'on'"
                                    : "a date or time after 'at'");
        return std::nullopt;
      }
      PpInfo a;
      a.kind = PpInfo::Kind::At;
      a.punctual = p->text == "at";
      a.date_text = d->text;
      a.pos = i;
      a.tree = node(
          "PP", {{Role::Head, leaf("P", p->text, i)},
                 {Role::Complement,
                  leaf(d->kind == Token::Kind::Date ? "DATE" : "TIME",
                       d->text, i + 1)}});
      return std::make_pair(a, i + 2);
    }
    if (p->text == "for") {
      const Token* n = tok(i + 1);
      if (!n || n->kind != Token::Kind::Number) {
        want(i + 1, "a count after 'for'");
        return std::nullopt;
      }
      const Token* u = tok(i + 2);
      std::optional<time::Unit> unit;
      if (u && u->kind == Token::Kind::Word) unit = unit_word(u->text);
      if (!unit) {
        want(i + 2, "a time unit after 'for " + n->text + "'");
        return std::nullopt;
      }
      PpInfo a;
      a.kind = PpInfo::Kind::For;
      a.unit = *unit;
      a.count = n->number;
      a.pos = i;
      a.tree = node("PP", {{Role::Head, leaf("P", "for", i)},
                           {Role::Complement, leaf("NUM", n->text, i + 1)},
                           {Role::Complement, leaf("UNIT", u->text, i + 2)}});
      return std::make_pair(a, i + 2 + 1);
    }
    return std::nullopt;
  }

  // Verb token at i whose analyses include one of the wanted forms.
  bool verb_at(std::size_t i, const std::vector<VerbForm>& forms,
               const std::string& what) {
    const Token* t = tok(i);
    if (t && t->kind == Token::Kind::Word) {
      for (const lex::VerbAnalysis& a : lex::verb_analyses(t->text, lx))
        for (VerbForm f : forms)
          if (a.form == f) return true;
    }
    want(i, what);
    return false;
  }

  // True when some analysis with one of the forms is transitive.
  bool arity_available(const std::string& word,
                       const std::vector<VerbForm>& forms,
                       bool transitive) {
    for (const lex::VerbAnalysis& a : lex::verb_analyses(word, lx))
      for (VerbForm f : forms)
        if (a.form == f && a.entry->transitive == transitive) return true;
    return false;
  }

  std::optional<std::pair<std::size_t, std::size_t>> ever(std::size_t i) {
    if (word_at(i, "ever")) return std::make_pair(i, i + 1);
    return std::nullopt;
  }

  static std::vector<VerbForm> forms_for_aux(const std::string& a) {
    if (a == "did" || a == "does") return {VerbForm::Base};
    if (a == "was" || a == "were" || a == "is" || a == "are")
      return {VerbForm::PresentParticiple};
    if (a == "had" || a == "has") return {VerbForm::PastParticiple};
    return {VerbForm::Past, VerbForm::ThirdSingular};
  }

  // Matches the verb and (when the verb is transitive) the object.
  // Returns the position after the object.
  std::optional<std::size_t> verb_and_object(Core& core, std::size_t i,
                                             const std::vector<VerbForm>&
                                                 forms,
                                             bool object_filled) {
    if (auto e = ever(i)) {
      core.ever_pos = e->first;
      i = e->second;
    }
    if (!verb_at(i, forms, "a verb")) return std::nullopt;
    core.verb_word = ts[i].text;
    core.verb_pos = i;
    ++i;
    if (object_filled) return i;
    bool can_take = arity_available(core.verb_word, forms, true);
    bool can_skip = arity_available(core.verb_word, forms, false);
    if (can_take) {
      if (auto o = np(i)) {
        core.object = o->first;
        return o->second;
      }
      if (!can_skip) return std::nullopt;
    }
    if (can_skip) return i;
    return std::nullopt;
  }

  std::optional<std::pair<Core, std::size_t>> core(std::size_t i) {
    const Token* t = tok(i);
    if (!t) {
      want(i, "a question");
      return std::nullopt;
    }
    // Auxiliary-first yes/no question.
    if (t->kind == Token::Kind::Word && is_aux(t->text)) {
      Core c;
      c.aux = t->text;
      c.aux_pos = i;
      auto subj = np(i + 1);
      if (!subj) return std::nullopt;
      c.subject = subj->first;
      auto next = verb_and_object(c, subj->second, forms_for_aux(c.aux),
                                  false);
      if (!next) return std::nullopt;
      return std::make_pair(c, *next);
    }
    // Wh-first question, or a declarative.
    auto first = np(i);
    if (!first) return std::nullopt;
    bool wh = first->first.kind == NpInfo::Kind::Wh ||
              first->first.kind == NpInfo::Kind::WhBare;
    std::size_t j = first->second;
    const Token* u = tok(j);
    if (u && u->kind == Token::Kind::Word && is_aux(u->text)) {
      if (wh) {
        // Object wh: the fronted phrase fills the object slot.
        if (auto subj = np(j + 1)) {
          Core c;
          c.aux = u->text;
          c.aux_pos = j;
          c.subject = subj->first;
          c.object = first->first;
          if (auto next = verb_and_object(c, subj->second,
                                          forms_for_aux(c.aux), true)) {
            if (arity_available(c.verb_word, forms_for_aux(c.aux), true))
              return std::make_pair(c, *next);
            want(c.verb_pos, "a verb that takes an object");
          }
        }
      }
      // Mid-sentence auxiliary: the first phrase is the subject of a
      // progressive or perfect ("IBI was advertising...", "who had fixed...").
      Core c;
      c.aux = u->text;
      c.aux_pos = j;
      c.subject = first->first;
      auto next = verb_and_object(c, j + 1, forms_for_aux(c.aux), false);
      if (!next) return std::nullopt;
      return std::make_pair(c, *next);
    }
    // Subject wh question or declarative: tensed verb follows.
    Core c;
    c.subject = first->first;
    auto next = verb_and_object(
        c, j, {VerbForm::Past, VerbForm::ThirdSingular}, false);
    if (!next) return std::nullopt;
    return std::make_pair(c, *next);
  }

  std::vector<Sentence> run() {
    std::vector<Sentence> out;
    Sentence s;
    std::size_t i = 0;
    // Fronted material: "when" and temporal PPs, in any order.
    for (;;) {
      if (word_at(i, "when")) {
        if (s.when_pos)
          throw GramError("multiple 'when' in one question");
        s.when_pos = i;
        ++i;
        continue;
      }
      if (auto a = pp(i)) {
        s.adjuncts.push_back(a->first);
        i = a->second;
        continue;
      }
      break;
    }
    auto c = core(i);
    if (!c) return out;
    s.core = c->first;
    i = c->second;
    for (;;) {
      if (word_at(i, "when"))
        throw GramError("'when' is only covered in fronted position");
      if (auto a = pp(i)) {
        s.adjuncts.push_back(a->first);
        i = a->second;
        continue;
      }
      break;
    }
    if (i != ts.size()) {
      want(i, "end of question");
      return out;
    }
    out.push_back(std::move(s));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Trees: one per adjunct-attachment assignment.

bool is_perfect_aux(const std::string& aux) {
  return aux == "had" || aux == "has";
}

// Builds the S tree given which adjuncts go low (onto the participle VP).
TreePtr build_tree(const Sentence& s, const std::vector<bool>& low) {
  std::vector<std::pair<Role, TreePtr>> vp_kids;
  const Core& c = s.core;
  vp_kids.push_back({Role::Head, leaf("V", c.verb_word, c.verb_pos)});
  if (c.object) vp_kids.push_back({Role::Complement, c.object->tree});
  if (c.ever_pos)
    vp_kids.push_back({Role::Adjunct, leaf("ADV", "ever", *c.ever_pos)});
  for (std::size_t k = 0; k < s.adjuncts.size(); ++k)
    if (low[k]) vp_kids.push_back({Role::Adjunct, s.adjuncts[k].tree});
  std::sort(vp_kids.begin(), vp_kids.end(),
            [](const auto& a, const auto& b) {
              return a.second->pos < b.second->pos;
            });
  TreePtr vp = node("VP", std::move(vp_kids));

  std::vector<std::pair<Role, TreePtr>> s_kids;
  if (s.when_pos)
    s_kids.push_back({Role::Adjunct, leaf("WHEN", "when", *s.when_pos)});
  for (std::size_t k = 0; k < s.adjuncts.size(); ++k)
    if (!low[k]) s_kids.push_back({Role::Adjunct, s.adjuncts[k].tree});
  if (!c.aux.empty())
    s_kids.push_back({Role::Complement, leaf("AUX", c.aux, c.aux_pos)});
  s_kids.push_back({Role::Subject, c.subject.tree});
  s_kids.push_back({Role::Head, vp});
  std::sort(s_kids.begin(), s_kids.end(),
            [](const auto& a, const auto& b) {
              return a.second->pos < b.second->pos;
            });
  return node("S", std::move(s_kids));
}

// ---------------------------------------------------------------------------
// Composition.

struct StoreItem {
  enum class Kind { Exists, Interrog, InterrogMxl };
  Kind kind = Kind::Exists;
  std::string var;
  std::string restriction_pred;  // empty for bare wh and for mxl
  std::size_t pos = 0;
};

struct Extract {
  std::string aux;
  const ParseTree* subject = nullptr;
  const ParseTree* object = nullptr;
  std::string verb_word;
  std::vector<const ParseTree*> high;  // S-level PPs, surface order
  std::vector<const ParseTree*> low;   // VP-level PPs, surface order
  std::optional<std::size_t> when_pos;
};

const ParseTree* find_head(const ParseTree& t) {
  for (const auto& [role, d] : t.daughters)
    if (role == Role::Head) return d.get();
  return nullptr;
}

Extract extract(const ParseTree& s) {
  Extract e;
  const ParseTree* vp = nullptr;
  for (const auto& [role, d] : s.daughters) {
    if (role == Role::Head) {
      vp = d.get();
    } else if (role == Role::Subject) {
      e.subject = d.get();
    } else if (d->label == "AUX") {
      e.aux = d->word;
    } else if (d->label == "WHEN") {
      e.when_pos = d->pos;
    } else if (d->label == "PP") {
      e.high.push_back(d.get());
    }
  }
  if (!vp) throw GramError("internal: sentence without a verb phrase");
  const ParseTree* v = find_head(*vp);
  if (!v) throw GramError("internal: verb phrase without a verb");
  e.verb_word = v->word;
  for (const auto& [role, d] : vp->daughters) {
    if (d->label == "NP") e.object = d.get();
    if (d->label == "PP") e.low.push_back(d.get());
  }
  return e;
}

top::Term np_semantics(const ParseTree& np, const lex::Lexicon& lx,
                       std::vector<StoreItem>& store, int& next_entity) {
  const ParseTree* head = find_head(np);
  if (!head) throw GramError("internal: noun phrase without a head");
  if (head->label == "NAME") return top::constant(head->word);
  StoreItem item;
  item.var = "x" + std::to_string(next_entity++);
  item.pos = np.pos;
  if (head->label == "WH") {
    item.kind = StoreItem::Kind::Interrog;  // bare who/what
  } else {
    const ParseTree* det = nullptr;
    for (const auto& [role, d] : np.daughters) {
      (void)role;
      if (d.get() != head) det = d.get();
    }
    if (!det) throw GramError("internal: determined phrase without spec");
    item.kind = det->label == "WH" ? StoreItem::Kind::Interrog
                                   : StoreItem::Kind::Exists;
    auto noun = lx.nouns.find(head->word);
    if (noun == lx.nouns.end())
      throw GramError("internal: unknown noun '" + head->word + "'");
    item.restriction_pred = noun->second.pred;
  }
  store.push_back(item);
  return top::var(item.var);
}

// Decoded temporal adjunct, rebuilt from its PP subtree.
struct Adjunct {
  bool is_at = false;
  bool punctual = false;
  time::DateExpr pattern;
  time::Unit unit = time::Unit::Day;
  long count = 0;
  std::size_t pos = 0;
};

Adjunct decode_pp(const ParseTree& pp) {
  Adjunct a;
  a.pos = pp.pos;
  const ParseTree* p = find_head(pp);
  if (!p) throw GramError("internal: adjunct without a preposition");
  if (p->word == "for") {
    const ParseTree* num = nullptr;
    const ParseTree* unit = nullptr;
    for (const auto& [role, d] : pp.daughters) {
      (void)role;
      if (d->label == "NUM") num = d.get();
      if (d->label == "UNIT") unit = d.get();
    }
    if (!num || !unit) throw GramError("internal: bad duration adjunct");
    if (auto n = number_word(num->word))
      a.count = *n;
    else
      a.count = std::stol(num->word);
    std::string u = unit->word;
    if (auto uu = unit_word(u))
      a.unit = *uu;
    else
      throw GramError("internal: bad time unit '" + u + "'");
    return a;
  }
  a.is_at = true;
  a.punctual = p->word == "at";
  for (const auto& [role, d] : pp.daughters) {
    (void)role;
    if (d->label == "DATE" || d->label == "TIME")
      a.pattern = time::parse_date_expr(d->word);
  }
  return a;
}

top::FormulaPtr apply_adjunct(const Adjunct& a, top::FormulaPtr m) {
  if (a.is_at) return top::make_at(a.pattern, std::move(m));
  return top::make_for(a.unit, a.count, std::move(m));
}

// "V-ing" under was/were/is/are; progressives drop the culmination.
bool progressive_aux(const std::string& aux) {
  return aux == "was" || aux == "were" || aux == "is" || aux == "are";
}

std::vector<top::FormulaPtr> compose_impl(const ParseTree& s,
                                          const lex::Lexicon& lx) {
  Extract e = extract(s);

  // Tense features from the auxiliary (or from the verb form itself).
  bool prog = progressive_aux(e.aux);
  bool perf = is_perfect_aux(e.aux);
  std::vector<VerbForm> forms;
  if (e.aux == "did" || e.aux == "does") {
    forms = {VerbForm::Base};
  } else if (prog) {
    forms = {VerbForm::PresentParticiple};
  } else if (perf) {
    forms = {VerbForm::PastParticiple};
  } else if (e.aux.empty()) {
    forms = {VerbForm::Past, VerbForm::ThirdSingular};
  } else {
    throw GramError("internal: unknown auxiliary '" + e.aux + "'");
  }

  std::vector<top::FormulaPtr> readings;
  std::string deferred_error;
  for (const lex::VerbAnalysis& va :
       lex::verb_analyses(e.verb_word, lx)) {
    if (std::find(forms.begin(), forms.end(), va.form) == forms.end())
      continue;
    const lex::VerbEntry& verb = *va.entry;
    if (verb.transitive != (e.object != nullptr)) {
      deferred_error = e.object
                           ? "the verb '" + verb.base +
                                 "' does not take an object"
                           : "the verb '" + verb.base + "' needs an object";
      continue;
    }

    bool past;
    if (e.aux == "did" || e.aux == "was" || e.aux == "were" ||
        e.aux == "had")
      past = true;
    else if (e.aux == "does" || e.aux == "is" || e.aux == "are" ||
             e.aux == "has")
      past = false;
    else
      past = va.form == VerbForm::Past;

    if (!past && !prog && !perf &&
        verb.verb_class != lex::VerbClass::State) {
      deferred_error =
          "the simple present is only covered for state verbs ('" +
          verb.base + "' is " + top::verb_class_name(verb.verb_class) + ")";
      continue;
    }

    // Argument terms and the quantifier store, in surface order.
    std::vector<StoreItem> store;
    int next_entity = 1;
    std::vector<const ParseTree*> nps;
    if (e.subject) nps.push_back(e.subject);
    if (e.object) nps.push_back(e.object);
    std::sort(nps.begin(), nps.end(),
              [](const ParseTree* a, const ParseTree* b) {
                return a->pos < b->pos;
              });
    std::map<const ParseTree*, top::Term> terms;
    for (const ParseTree* np : nps)
      terms.emplace(np, np_semantics(*np, lx, store, next_entity));
    if (!e.subject) throw GramError("internal: sentence without subject");
    std::vector<top::Term> args{terms.at(e.subject)};
    if (e.object) args.push_back(terms.at(e.object));

    top::FormulaPtr nucleus = top::make_pred(verb.pred, args);
    bool culm = verb.verb_class == lex::VerbClass::CulmActivity && !prog;
    if (culm) nucleus = top::make_culm(nucleus);

    // Punctual-"at" coercion: activities are read as starting, culminating
    // activities as finishing (then, as a second reading, as starting).
    std::vector<Adjunct> low, high;
    bool punctual_at = false;
    for (const ParseTree* ppt : e.low) {
      low.push_back(decode_pp(*ppt));
      punctual_at |= low.back().is_at && low.back().punctual;
    }
    for (const ParseTree* ppt : e.high) {
      high.push_back(decode_pp(*ppt));
      punctual_at |= high.back().is_at && high.back().punctual;
    }
    auto by_pos = [](const Adjunct& a, const Adjunct& b) {
      return a.pos < b.pos;
    };
    std::sort(low.begin(), low.end(), by_pos);
    std::sort(high.begin(), high.end(), by_pos);
    enum class Coerce { None, End, Begin };
    std::vector<Coerce> variants{Coerce::None};
    if (punctual_at && !prog) {
      if (verb.verb_class == lex::VerbClass::CulmActivity)
        variants = {Coerce::End, Coerce::Begin};
      else if (verb.verb_class == lex::VerbClass::Activity)
        variants = {Coerce::Begin};
    }

    for (Coerce coerce : variants) {
      top::FormulaPtr vp = nucleus;
      if (coerce == Coerce::End) vp = top::make_end(vp);
      if (coerce == Coerce::Begin) vp = top::make_begin(vp);

      for (auto it = low.rbegin(); it != low.rend(); ++it)
        vp = apply_adjunct(*it, vp);
      if (perf) vp = top::make_perf("e2", vp);
      top::FormulaPtr matrix =
          past ? top::make_past("e1", vp) : top::make_pres("e1", vp);
      for (auto it = high.rbegin(); it != high.rend(); ++it)
        matrix = apply_adjunct(*it, matrix);

      // Unstore quantifiers: leftmost surface position ends up outermost.
      std::vector<StoreItem> items = store;
      if (e.when_pos) {
        StoreItem mxl;
        mxl.kind = StoreItem::Kind::InterrogMxl;
        mxl.var = "e1";
        mxl.pos = *e.when_pos;
        items.push_back(mxl);
      }
      std::sort(items.begin(), items.end(),
                [](const StoreItem& a, const StoreItem& b) {
                  return a.pos < b.pos;
                });
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        std::vector<top::FormulaPtr> restriction;
        if (!it->restriction_pred.empty())
          restriction.push_back(top::make_pred(it->restriction_pred,
                                               {top::var(it->var)}));
        switch (it->kind) {
          case StoreItem::Kind::Exists:
            matrix = top::make_exists(it->var, restriction, matrix);
            break;
          case StoreItem::Kind::Interrog:
            matrix = top::make_interrog(it->var, restriction, matrix);
            break;
          case StoreItem::Kind::InterrogMxl:
            matrix = top::make_interrog_mxl(it->var, matrix);
            break;
        }
      }

      readings.push_back(top::cancel_culm_under_for(matrix));
    }
  }
  if (readings.empty()) {
    if (!deferred_error.empty()) throw GramError(deferred_error);
    throw GramError("no reading: the verb '" + e.verb_word +
                    "' does not fit this frame");
  }
  return readings;
}

}  // namespace

std::vector<TreePtr> parse(const std::string& question,
                           const lex::Lexicon& lx) {
  std::vector<Token> ts = tokenize(question, lx);
  if (ts.empty()) throw GramError("empty question");
  for (const Token& t : ts) {
    if (t.kind != Token::Kind::Word) continue;
    if (builtin_word(t.text) || lx.nouns.count(t.text) ||
        unit_word(t.text) || !lex::verb_analyses(t.text, lx).empty())
      continue;
    throw GramError("unknown word '" + t.text + "' at token " +
                    std::to_string(t.pos + 1));
  }
  Parser p{ts, lx};
  std::vector<Sentence> sentences = p.run();
  if (sentences.empty())
    throw GramError("no parse: expected " + p.best_what + " at token " +
                    std::to_string(p.best + 1));
  std::vector<TreePtr> trees;
  for (const Sentence& s : sentences) {
    std::size_t n = s.adjuncts.size();
    bool perfect = is_perfect_aux(s.core.aux);
    if (!perfect || n == 0) {
      trees.push_back(build_tree(s, std::vector<bool>(n, false)));
      continue;
    }
    // Each adjunct attaches to the sentence or to the participle phrase;
    // the all-high (widest) reading comes first.
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<bool> low(n);
      for (std::size_t k = 0; k < n; ++k)
        low[k] = (mask >> (n - 1 - k)) & 1;
      trees.push_back(build_tree(s, low));
    }
  }
  return trees;
}

std::vector<top::FormulaPtr> compose(const TreePtr& tree,
                                     const lex::Lexicon& lx) {
  if (!tree) throw GramError("internal: null parse tree");
  return compose_impl(*tree, lx);
}

std::vector<top::FormulaPtr> analyze(const std::string& question,
                                     const lex::Lexicon& lx) {
  std::vector<TreePtr> trees = parse(question, lx);
  std::vector<top::FormulaPtr> out;
  std::string first_error;
  for (const TreePtr& t : trees) {
    std::vector<top::FormulaPtr> readings;
    try {
      readings = compose(t, lx);
    } catch (const GramError& e) {
      if (first_error.empty()) first_error = e.what();
      continue;
    }
    for (top::FormulaPtr& f : readings) {
      bool dup = false;
      for (const top::FormulaPtr& g : out)
        if (top::alpha_equal(f, g)) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(std::move(f));
    }
  }
  if (out.empty())
    throw GramError(first_error.empty() ? "no reading" : first_error);
  return out;
}

}  // namespace tqa::gram
