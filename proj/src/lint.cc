#include "twparse/lint.h"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include "twparse/utf8.h"

namespace twparse {

const char* token_class_name(TokenClass c) {
  switch (c) {
    case TokenClass::Emoticon: return "emoticon";
    case TokenClass::RtMarker: return "rt_marker";
    case TokenClass::AtMention: return "at_mention";
    case TokenClass::Hashtag: return "hashtag";
    case TokenClass::Url: return "url";
    case TokenClass::TruncatedWord: return "truncated_word";
    case TokenClass::Plain: return "plain";
  }
  return "?";
}

namespace {

bool word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

const std::set<std::string>& emoticon_list() {
  static const std::set<std::string> list = {
      ":)",  ":(",   ":D",  ":P",  ":p",  ":d",  ";)",  ";(",  ":-)", ":-(",
      ":-D", ":-P",  ";-)", ":o)", ":]",  ":[",  ":3",  ":'(", ":')", "=)",
      "=(",  "=D",   "=P",  "=]",  "=[",  "<3",  "</3", ":/",  ":\\", ":-/",
      ":|",  ":-|",  ":*",  ":-*", "xD",  "XD",  "xd",  "^^",  "^_^", "o_O",
      "O_o", "o.O",  "O.o", "-_-", "T_T", ";_;", "._.", ":O",  ":o",  ":-O",
      "D:",  "(:",   "):",  "(=",  "=/",  "8)",  "8-)", "B)",  "B-)", ":-]",
      ";D",  ";P",   ";p",  ":-3", "<33", "<333"};
  return list;
}

bool is_emoji_codepoint(char32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1FAFF) ||  // pictographs, emoji blocks
         (cp >= 0x2600 && cp <= 0x27BF) ||    // misc symbols, dingbats
         (cp >= 0x1F000 && cp <= 0x1F2FF) || cp == 0x2764 || cp == 0x2665 ||
         cp == 0x2661 || (cp >= 0xFE00 && cp <= 0xFE0F) ||  // variation selectors
         (cp >= 0x1F1E6 && cp <= 0x1F1FF);
}

}  // namespace

bool is_at_mention_form(const std::string& form) {
  if (form.size() < 2 || form[0] != '@') return false;
  for (size_t i = 1; i < form.size(); ++i)
    if (!word_char(form[i])) return false;
  return true;
}

bool is_hashtag_form(const std::string& form) {
  if (form.size() < 2 || form[0] != '#') return false;
  for (size_t i = 1; i < form.size(); ++i)
    if (!word_char(form[i])) return false;
  return true;
}

bool is_url_form(const std::string& form) {
  if (form == "URL") return true;  // anonymized corpora
  std::string low = lowercase(form);
  if (starts_with(low, "http://") || starts_with(low, "https://") ||
      starts_with(low, "www.")) {
    return true;
  }
  static const std::regex domain(
      R"(^[a-z0-9\-]+(\.[a-z0-9\-]+)*\.(com|org|net|edu|gov|io|co|ly|me|tv|be|gl|am)(/\S*)?$)",
      std::regex::icase);
  return std::regex_match(form, domain);
}

bool is_emoticon_form(const std::string& form) {
  if (emoticon_list().count(form)) return true;
  std::vector<std::string> chars = utf8_chars(form);
  if (chars.empty()) return false;
  bool all_emoji = true;
  for (const std::string& ch : chars)
    if (!is_emoji_codepoint(utf8_codepoint(ch))) all_emoji = false;
  return all_emoji;
}

namespace {

bool is_truncated_form(const std::string& form) {
  std::vector<std::string> chars = utf8_chars(form);
  size_t trailing = 0;
  while (trailing < chars.size()) {
    const std::string& ch = chars[chars.size() - 1 - trailing];
    if (ch == "." || ch == "…")
      ++trailing;
    else
      break;
  }
  if (trailing == 0 || trailing == chars.size()) return false;
  bool has_ellipsis = false;
  for (size_t i = chars.size() - trailing; i < chars.size(); ++i)
    if (chars[i] == "…") has_ellipsis = true;
  return has_ellipsis || trailing >= 2;
}

bool terminal_position(const Sentence& s, int token_id) {
  for (size_t i = static_cast<size_t>(token_id); i < s.tokens.size(); ++i)
    if (s.tokens[i].upos != "PUNCT" && s.tokens[i].upos != "SYM") return false;
  return true;
}

}  // namespace

TokenClass classify_token(const Sentence& s, int token_id) {
  const Token& t = s.tokens[token_id - 1];
  if (is_url_form(t.form)) return TokenClass::Url;
  if (t.form == "@USER" || is_at_mention_form(t.form)) return TokenClass::AtMention;
  if (is_hashtag_form(t.form)) return TokenClass::Hashtag;
  if (lowercase(t.form) == "rt") return TokenClass::RtMarker;
  if (is_emoticon_form(t.form)) return TokenClass::Emoticon;
  if (is_truncated_form(t.form) && terminal_position(s, token_id))
    return TokenClass::TruncatedWord;
  return TokenClass::Plain;
}

std::string anonymize(const std::string& raw) {
  static const std::regex url(R"((https?://\S+|www\.\S+))");
  static const std::regex mention(R"(@\w+)");
  std::string out = std::regex_replace(raw, url, "URL");
  out = std::regex_replace(out, mention, "@USER");
  return out;
}

const std::vector<LintRule>& lint_rules() {
  static const std::vector<LintRule> rules = {
      {"url-label", LintRule::Error,
       "non-syntactic URLs are labeled list, not discourse"},
      {"nonsyn-label", LintRule::Error,
       "non-syntactic tokens other than URLs are labeled discourse"},
      {"nonsyn-upos", LintRule::Error,
       "non-syntactic tokens are tagged X (emoticons SYM)"},
      {"retweet", LintRule::Error,
       "retweet construction: RT is X, at-mention attaches to RT as discourse, "
       "colon attaches to RT as punct"},
      {"vocative-mention", LintRule::Error,
       "vocative at-mentions are tagged PROPN"},
      {"all-nonsyn-attach", LintRule::Error,
       "a fully non-syntactic sentence attaches every token to the first one"},
      {"unsplit-contraction", LintRule::Warning,
       "contraction should be split into syntactic words"},
      {"goeswith-order", LintRule::Error,
       "goeswith dependents follow their head"},
  };
  return rules;
}

const LintRule* lint_rule(const std::string& code) {
  for (const LintRule& r : lint_rules())
    if (r.code == code) return &r;
  return nullptr;
}

namespace {

void hit(std::vector<LintHit>& out, const char* code, int token_id, std::string msg) {
  out.push_back({lint_rule(code), token_id, std::move(msg)});
}

bool nonsyntactic(const Token& t) {
  return t.deprel == "discourse" || t.deprel == "list";
}

const std::set<std::string>& unsplit_contractions() {
  static const std::set<std::string> list = {"gonna", "wanna",  "gotta", "lemme",
                                             "gimme", "dunno",  "outta", "tryna",
                                             "cannot", "kinda", "sorta"};
  return list;
}

bool clitic_suffix(const std::string& low) {
  static const std::vector<std::string> suffixes = {"n't", "'s", "'m", "'re",
                                                    "'ve", "'ll", "'d"};
  for (const std::string& suf : suffixes)
    if (ends_with(low, suf) && low.size() > suf.size()) return true;
  return false;
}

}  // namespace

std::vector<LintHit> lint_sentence(const Sentence& s) {
  std::vector<LintHit> out;
  int n = static_cast<int>(s.tokens.size());

  for (const Token& t : s.tokens) {
    TokenClass cls = classify_token(s, t.id);

    if (nonsyntactic(t)) {
      if (cls == TokenClass::Url && t.deprel == "discourse")
        hit(out, "url-label", t.id, "URL '" + t.form + "' labeled discourse");
      if (cls != TokenClass::Url && cls != TokenClass::Plain && t.deprel == "list")
        hit(out, "nonsyn-label", t.id,
            std::string(token_class_name(cls)) + " '" + t.form + "' labeled list");
      if (cls == TokenClass::Emoticon && t.upos != "SYM")
        hit(out, "nonsyn-upos", t.id,
            "emoticon '" + t.form + "' tagged " + t.upos + ", expected SYM");
      if (cls != TokenClass::Emoticon && cls != TokenClass::Plain && t.upos != "X")
        hit(out, "nonsyn-upos", t.id,
            std::string(token_class_name(cls)) + " '" + t.form + "' tagged " + t.upos +
                ", expected X");
    }

    if (cls == TokenClass::AtMention && t.deprel == "vocative" && t.upos != "PROPN")
      hit(out, "vocative-mention", t.id,
          "vocative at-mention '" + t.form + "' tagged " + t.upos + ", expected PROPN");

    if (cls == TokenClass::Plain) {
      std::string low = lowercase(t.form);
      if (unsplit_contractions().count(low) || clitic_suffix(low))
        hit(out, "unsplit-contraction", t.id, "unsplit contraction '" + t.form + "'");
      else if (low == "its" && (t.upos == "AUX" || t.upos == "VERB"))
        hit(out, "unsplit-contraction", t.id,
            "'its' used as a copula contraction should be split");
    }

    if (t.deprel == "goeswith" && t.head > t.id)
      hit(out, "goeswith-order", t.id, "goeswith dependent precedes its head");
  }

  // retweet construction: RT used non-syntactically, followed by an at-mention
  for (const Token& t : s.tokens) {
    if (classify_token(s, t.id) != TokenClass::RtMarker) continue;
    if (t.upos != "X" && t.deprel != "discourse") continue;  // syntactic use of "RT"
    if (t.id >= n) continue;
    const Token& mention = s.tokens[t.id];  // token after RT
    if (classify_token(s, mention.id) != TokenClass::AtMention) continue;

    if (t.upos != "X")
      hit(out, "retweet", t.id, "RT tagged " + t.upos + ", expected X");
    if (t.deprel != "discourse" && t.head != 0)
      hit(out, "retweet", t.id, "RT labeled " + t.deprel + ", expected discourse");
    if (mention.head != t.id || mention.deprel != "discourse")
      hit(out, "retweet", mention.id,
          "at-mention after RT must attach to RT with discourse");
    if (mention.id < n) {
      const Token& colon = s.tokens[mention.id];
      if (colon.form == ":" && (colon.head != t.id || colon.deprel != "punct"))
        hit(out, "retweet", colon.id, "colon after RT must attach to RT with punct");
    }
  }

  // fully non-syntactic sentence: everything hangs off the first token
  bool all_nonsyn = !s.tokens.empty();
  for (const Token& t : s.tokens) {
    TokenClass cls = classify_token(s, t.id);
    bool classified = cls != TokenClass::Plain;
    bool punctish = t.upos == "PUNCT";
    if (!classified && !punctish) all_nonsyn = false;
  }
  if (all_nonsyn && s.has_heads()) {
    for (const Token& t : s.tokens) {
      int expected = t.id == 1 ? 0 : 1;
      if (t.head != expected) {
        hit(out, "all-nonsyn-attach", t.id,
            "token " + std::to_string(t.id) +
                " should attach to the first token of a fully non-syntactic sentence");
        break;
      }
    }
  }

  return out;
}

std::vector<std::string> lint_report(const Treebank& tb) {
  std::vector<std::string> lines;
  for (size_t i = 0; i < tb.sentences.size(); ++i) {
    const Sentence& s = tb.sentences[i];
    std::string id = s.sent_id().empty() ? std::to_string(i + 1) : s.sent_id();
    for (const LintHit& h : lint_sentence(s)) {
      lines.push_back(id + "\t" + std::to_string(h.token_id) + "\t" + h.rule->code +
                      "\t" + h.message);
    }
  }
  return lines;
}

ClassStats corpus_stats(const Treebank& tb) {
  ClassStats stats;
  for (const Sentence& s : tb.sentences) {
    for (const Token& t : s.tokens) {
      ++stats.total_tokens;
      TokenClass cls = classify_token(s, t.id);
      if (cls == TokenClass::Plain) continue;
      if (t.deprel == "discourse" || t.deprel == "list")
        ++stats.rows[cls].non_syntactic;
      else
        ++stats.rows[cls].syntactic;
    }
  }
  return stats;
}

std::string ClassStats::to_table() const {
  std::ostringstream out;
  out << "class            syntactic%  non-syntactic%\n";
  long syn_total = 0, non_total = 0;
  for (TokenClass cls : {TokenClass::Emoticon, TokenClass::RtMarker, TokenClass::Hashtag,
                         TokenClass::Url, TokenClass::TruncatedWord,
                         TokenClass::AtMention}) {
    auto it = rows.find(cls);
    long syn = it == rows.end() ? 0 : it->second.syntactic;
    long non = it == rows.end() ? 0 : it->second.non_syntactic;
    syn_total += syn;
    non_total += non;
    std::string name = token_class_name(cls);
    out << name << std::string(17 - name.size(), ' ') << fixed2(pct(syn)) << "        "
        << fixed2(pct(non)) << "\n";
  }
  out << "total            " << fixed2(pct(syn_total)) << "        "
      << fixed2(pct(non_total)) << "\n";
  out << "tokens: " << total_tokens << "\n";
  return out.str();
}

}  // namespace twparse
