// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The Forge Authors.

#include "forge/html.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace forge::html {

namespace {

bool is_void(const std::string& tag) {
  static const char* const kVoid[] = {"area", "base", "br",    "col",  "embed",
                                      "hr",   "img",  "input", "link", "meta",
                                      "param", "source", "track", "wbr"};
  return std::any_of(std::begin(kVoid), std::end(kVoid),
                     [&](const char* v) { return tag == v; });
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         c == ':';
}

}  // namespace

std::optional<std::string> Node::attr(const std::string& name) const {
  auto it = attrs.find(name);
  if (it == attrs.end()) return std::nullopt;
  return it->second;
}

bool Node::has_class(std::string_view cls) const {
  auto it = attrs.find("class");
  if (it == attrs.end()) return false;
  for (const auto& c : text::split_ws(it->second))
    if (c == cls) return true;
  return false;
}

std::string Node::text_content() const {
  std::string raw;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (n.is_text()) {
      raw += n.text;
      return;
    }
    for (const auto& c : n.children) walk(*c);
  };
  walk(*this);
  std::string out;
  bool space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const auto name = s.substr(i + 1, semi - i - 1);
    std::string rep;
    if (name == "amp") rep = "&";
    else if (name == "lt") rep = "<";
    else if (name == "gt") rep = ">";
    else if (name == "quot") rep = "\"";
    else if (name == "apos") rep = "'";
    else if (name == "nbsp") rep = "\xc2\xa0";
    else if (!name.empty() && name[0] == '#') {
      try {
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        const auto digits = std::string(name.substr(hex ? 2 : 1));
        rep = text::to_utf8(static_cast<char32_t>(std::stoul(digits, nullptr, hex ? 16 : 10)));
      } catch (const std::logic_error&) {
        rep.clear();
      }
    }
    if (rep.empty()) {
      out.push_back('&');
      continue;
    }
    out += rep;
    i = semi;
  }
  return out;
}

Document Document::parse(std::string_view h) {
  Document doc;
  doc.root_ = std::make_unique<Node>();
  doc.root_->tag = "#document";
  std::vector<Node*> stack{doc.root_.get()};
  auto append = [&](std::unique_ptr<Node> n) -> Node* {
    n->parent = stack.back();
    stack.back()->children.push_back(std::move(n));
    return stack.back()->children.back().get();
  };
  auto add_text = [&](std::string_view raw) {
    if (raw.empty()) return;
    auto n = std::make_unique<Node>();
    n->text = decode_entities(raw);
    append(std::move(n));
  };

  std::size_t i = 0;
  while (i < h.size()) {
    const auto lt = h.find('<', i);
    if (lt == std::string_view::npos) {
      add_text(h.substr(i));
      break;
    }
    add_text(h.substr(i, lt - i));
    i = lt;
    if (h.compare(i, 4, "<!--") == 0) {
      const auto end = h.find("-->", i + 4);
      i = end == std::string_view::npos ? h.size() : end + 3;
      continue;
    }
    if (h.compare(i, 2, "<!") == 0 || h.compare(i, 2, "<?") == 0) {
      const auto end = h.find('>', i);
      i = end == std::string_view::npos ? h.size() : end + 1;
      continue;
    }
    if (h.compare(i, 2, "</") == 0) {
      std::size_t j = i + 2;
      while (j < h.size() && name_char(h[j])) ++j;
      const auto tag = lower(h.substr(i + 2, j - i - 2));
      const auto end = h.find('>', j);
      i = end == std::string_view::npos ? h.size() : end + 1;
      for (std::size_t k = stack.size(); k-- > 1;) {
        if (stack[k]->tag == tag) {
          stack.resize(k);
          break;
        }
      }
      continue;
    }
    std::size_t j = i + 1;
    while (j < h.size() && name_char(h[j])) ++j;
    if (j == i + 1) {
      add_text("<");
      ++i;
      continue;
    }
    auto node = std::make_unique<Node>();
    node->tag = lower(h.substr(i + 1, j - i - 1));
    bool self_closing = false;
    while (j < h.size()) {
      while (j < h.size() && std::isspace(static_cast<unsigned char>(h[j]))) ++j;
      if (j >= h.size()) break;
      if (h[j] == '>') {
        ++j;
        break;
      }
      if (h[j] == '/') {
        self_closing = true;
        ++j;
        continue;
      }
      std::size_t k = j;
      while (k < h.size() && !std::isspace(static_cast<unsigned char>(h[k])) &&
             h[k] != '=' && h[k] != '>' && h[k] != '/')
        ++k;
      auto name = lower(h.substr(j, k - j));
      j = k;
      std::string value;
      while (j < h.size() && std::isspace(static_cast<unsigned char>(h[j]))) ++j;
      if (j < h.size() && h[j] == '=') {
        ++j;
        while (j < h.size() && std::isspace(static_cast<unsigned char>(h[j]))) ++j;
        if (j < h.size() && (h[j] == '"' || h[j] == '\'')) {
          const char q = h[j];
          const auto end = h.find(q, j + 1);
          const auto stop = end == std::string_view::npos ? h.size() : end;
          value = decode_entities(h.substr(j + 1, stop - j - 1));
          j = std::min(h.size(), stop + 1);
        } else {
          k = j;
          while (k < h.size() && !std::isspace(static_cast<unsigned char>(h[k])) &&
                 h[k] != '>')
            ++k;
          value = decode_entities(h.substr(j, k - j));
          j = k;
        }
      }
      if (!name.empty()) node->attrs.emplace(std::move(name), std::move(value));
    }
    i = j;
    const std::string tag = node->tag;
    Node* added = append(std::move(node));
    if (tag == "script" || tag == "style") {
      const auto close = "</" + tag;
      auto end = i;
      while (true) {
        end = h.find('<', end);
        if (end == std::string_view::npos || lower(h.substr(end, close.size())) == close) break;
        ++end;
      }
      const auto stop = end == std::string_view::npos ? h.size() : end;
      auto t = std::make_unique<Node>();
      t->text = std::string(h.substr(i, stop - i));
      t->parent = added;
      added->children.push_back(std::move(t));
      const auto gt = stop < h.size() ? h.find('>', stop) : std::string_view::npos;
      i = gt == std::string_view::npos ? h.size() : gt + 1;
      continue;
    }
    if (!self_closing && !is_void(tag)) stack.push_back(added);
  }
  return doc;
}

// ---------------------------------------------------------------- selectors

bool Selector::Compound::matches(const Node& n) const {
  if (n.is_text()) return false;
  if (!tag.empty() && tag != "*" && n.tag != tag) return false;
  if (!id.empty() && n.attr("id") != id) return false;
  for (const auto& c : classes)
    if (!n.has_class(c)) return false;
  for (const auto& [name, value] : attrs) {
    auto v = n.attr(name);
    if (!v || (value && *v != *value)) return false;
  }
  return true;
}

Selector Selector::parse(std::string_view expr) {
  Selector sel;
  std::string e = text::trim(expr);
  const auto at = e.rfind('@');
  if (at != std::string::npos && e.find(']', at) == std::string::npos) {
    sel.attribute_ = lower(text::trim(e.substr(at + 1)));
    if (sel.attribute_->empty()) throw Error("empty attribute in selector '" + e + "'");
    e = text::trim(e.substr(0, at));
  }
  std::size_t i = 0;
  bool child = false;
  auto fail = [&](const std::string& what) {
    throw Error("selector '" + std::string(expr) + "': " + what);
  };
  auto ident = [&] {
    std::size_t j = i;
    while (j < e.size() && name_char(e[j])) ++j;
    if (j == i) fail("expected a name at position " + std::to_string(i));
    auto s = e.substr(i, j - i);
    i = j;
    return s;
  };
  while (i < e.size()) {
    while (i < e.size() && std::isspace(static_cast<unsigned char>(e[i]))) ++i;
    if (i >= e.size()) break;
    if (e[i] == '>') {
      if (sel.chain_.empty()) fail("leading '>'");
      child = true;
      ++i;
      continue;
    }
    Compound c;
    c.child_of_previous = child;
    child = false;
    if (e[i] == '*') {
      c.tag = "*";
      ++i;
    } else if (name_char(e[i])) {
      c.tag = lower(ident());
    }
    while (i < e.size() && !std::isspace(static_cast<unsigned char>(e[i])) && e[i] != '>') {
      if (e[i] == '.') {
        ++i;
        c.classes.push_back(ident());
      } else if (e[i] == '#') {
        ++i;
        c.id = ident();
      } else if (e[i] == '[') {
        const auto close = e.find(']', i);
        if (close == std::string::npos) fail("unterminated '['");
        const auto body = e.substr(i + 1, close - i - 1);
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
          c.attrs.emplace_back(lower(text::trim(body)), std::nullopt);
        } else {
          auto v = text::trim(body.substr(eq + 1));
          if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
            v = v.substr(1, v.size() - 2);
          c.attrs.emplace_back(lower(text::trim(body.substr(0, eq))), v);
        }
        i = close + 1;
      } else {
        fail(std::string("unexpected '") + e[i] + "'");
      }
    }
    sel.chain_.push_back(std::move(c));
  }
  if (sel.chain_.empty()) fail("empty selector");
  if (child) fail("trailing '>'");
  return sel;
}

bool Selector::matches_chain(const Node& n, std::size_t idx, const Node& scope) const {
  if (!chain_[idx].matches(n)) return false;
  if (idx == 0) return true;
  const bool direct = chain_[idx].child_of_previous;
  for (const Node* p = n.parent; p && p != scope.parent; p = p->parent) {
    if (matches_chain(*p, idx - 1, scope)) return true;
    if (direct || p == &scope) break;
  }
  return false;
}

std::vector<const Node*> Selector::select(const Node& scope) const {
  std::vector<const Node*> out;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    for (const auto& c : n.children) {
      if (matches_chain(*c, chain_.size() - 1, scope)) out.push_back(c.get());
      walk(*c);
    }
  };
  walk(scope);
  return out;
}

std::vector<std::string> Selector::extract(const Node& scope) const {
  std::vector<std::string> out;
  for (const Node* n : select(scope)) {
    std::string v = attribute_ ? n->attr(*attribute_).value_or("") : n->text_content();
    v = text::trim(v);
    if (!v.empty()) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace forge::html
