#include "tqa/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tqa::lex {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Single final consonant after a single vowel, as in "stop" or "run";
// w, x and y never double.
bool doubles_final(const std::string& b) {
  if (b.size() < 3) return false;
  char last = b[b.size() - 1];
  if (is_vowel(last) || last == 'w' || last == 'x' || last == 'y')
    return false;
  return is_vowel(b[b.size() - 2]) && !is_vowel(b[b.size() - 3]);
}

bool ends_with(const std::string& s, std::string_view suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw LexError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string inflect(const std::string& base, VerbForm f) {
  switch (f) {
    case VerbForm::Base:
      return base;
    case VerbForm::Past:
    case VerbForm::PastParticiple: {
      if (ends_with(base, "e")) return base + "d";
      if (ends_with(base, "y") && base.size() >= 2 &&
          !is_vowel(base[base.size() - 2]))
        return base.substr(0, base.size() - 1) + "ied";
      if (doubles_final(base)) return base + base.back() + "ed";
      return base + "ed";
    }
    case VerbForm::PresentParticiple: {
      if (ends_with(base, "e") && !ends_with(base, "ee"))
        return base.substr(0, base.size() - 1) + "ing";
      if (doubles_final(base)) return base + base.back() + "ing";
      return base + "ing";
    }
    case VerbForm::ThirdSingular: {
      if (ends_with(base, "s") || ends_with(base, "x") ||
          ends_with(base, "z") || ends_with(base, "ch") ||
          ends_with(base, "sh") || ends_with(base, "o"))
        return base + "es";
      if (ends_with(base, "y") && base.size() >= 2 &&
          !is_vowel(base[base.size() - 2]))
        return base.substr(0, base.size() - 1) + "ies";
      return base + "s";
    }
  }
  return base;
}

std::string verb_form(const VerbEntry& e, VerbForm f) {
  if (auto it = e.irregular.find(f); it != e.irregular.end())
    return it->second;
  return inflect(e.base, f);
}

std::vector<VerbAnalysis> verb_analyses(const std::string& word,
                                        const Lexicon& lx) {
  static constexpr VerbForm kForms[] = {
      VerbForm::Base, VerbForm::Past, VerbForm::PastParticiple,
      VerbForm::PresentParticiple, VerbForm::ThirdSingular};
  std::vector<VerbAnalysis> out;
  for (const auto& [base, entry] : lx.verbs)
    for (VerbForm f : kForms)
      if (verb_form(entry, f) == word) out.push_back({&entry, f});
  return out;
}

Lexicon load_lexicon(const std::string& text) {
  Lexicon lx;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (std::size_t hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> w;
    for (std::string t; ls >> t;) w.push_back(t);
    if (w.empty()) continue;

    if (w[0] == "verb") {
      if (w.size() < 4) fail(lineno, "verb needs base, class and template");
      VerbEntry e;
      e.base = lower(w[1]);
      auto cls = top::verb_class_from_name(w[2]);
      if (!cls || *cls == VerbClass::Timeless)
        fail(lineno, "unknown class '" + w[2] + "'");
      e.verb_class = *cls;
      const std::string& tpl = w[3];
      std::size_t open = tpl.find('(');
      if (open == std::string::npos || tpl.back() != ')' || open == 0)
        fail(lineno, "bad argument template '" + tpl + "'");
      e.pred = tpl.substr(0, open);
      std::string args = tpl.substr(open + 1, tpl.size() - open - 2);
      if (args == "subj")
        e.transitive = false;
      else if (args == "subj,obj")
        e.transitive = true;
      else
        fail(lineno, "bad argument template '" + tpl + "'");
      for (std::size_t i = 4; i < w.size(); ++i) {
        std::size_t eq = w[i].find('=');
        if (eq == std::string::npos)
          fail(lineno, "expected key=form, got '" + w[i] + "'");
        std::string key = w[i].substr(0, eq);
        std::string form = lower(w[i].substr(eq + 1));
        VerbForm slot;
        if (key == "past")
          slot = VerbForm::Past;
        else if (key == "pastpart")
          slot = VerbForm::PastParticiple;
        else if (key == "prespart")
          slot = VerbForm::PresentParticiple;
        else if (key == "third")
          slot = VerbForm::ThirdSingular;
        else
          fail(lineno, "unknown form key '" + key + "'");
        if (form.empty()) fail(lineno, "empty form for '" + key + "'");
        if (!e.irregular.emplace(slot, form).second)
          fail(lineno, "duplicate form key '" + key + "'");
      }
      if (!lx.verbs.emplace(e.base, e).second)
        fail(lineno, "duplicate verb '" + e.base + "'");
    } else if (w[0] == "noun") {
      if (w.size() != 3) fail(lineno, "noun needs word and predicate");
      NounEntry e{lower(w[1]), w[2]};
      if (!lx.nouns.emplace(e.word, e).second)
        fail(lineno, "duplicate noun '" + e.word + "'");
    } else if (w[0] == "name") {
      if (w.size() != 3) fail(lineno, "name needs word and constant");
      NameEntry e;
      e.constant = w[2];
      std::string part;
      std::istringstream ws(lower(w[1]));
      while (std::getline(ws, part, '_')) {
        if (part.empty()) fail(lineno, "bad name word '" + w[1] + "'");
        e.words.push_back(part);
      }
      if (e.words.empty()) fail(lineno, "bad name word '" + w[1] + "'");
      for (const NameEntry& other : lx.names)
        if (other.words == e.words)
          fail(lineno, "duplicate name '" + w[1] + "'");
      lx.names.push_back(std::move(e));
    } else {
      fail(lineno, "unknown directive '" + w[0] + "'");
    }
  }
  std::stable_sort(lx.names.begin(), lx.names.end(),
                   [](const NameEntry& a, const NameEntry& b) {
                     if (a.words.size() != b.words.size())
                       return a.words.size() > b.words.size();
                     return a.words < b.words;
                   });
  return lx;
}

}  // namespace tqa::lex
