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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/text.hpp"

// Minimal HTML tree and CSS-style selectors for record extraction from
// static pages. Forgiving by design of the input: unmatched close tags are
// ignored and unclosed elements end with their parent.
namespace forge::html {

struct Node {
  // Empty for text nodes.
  std::string tag;
  std::map<std::string, std::string> attrs;
  std::string text;
  std::vector<std::unique_ptr<Node>> children;
  const Node* parent = nullptr;

  bool is_text() const { return tag.empty(); }
  std::optional<std::string> attr(const std::string& name) const;
  bool has_class(std::string_view cls) const;
  // Concatenated descendant text, whitespace-collapsed and trimmed.
  std::string text_content() const;
};

class Document {
 public:
  static Document parse(std::string_view html);
  const Node& root() const { return *root_; }

 private:
  std::unique_ptr<Node> root_;
};

std::string decode_entities(std::string_view s);

// Supports: tag, #id, .class, [attr], [attr=value] compounds joined by
// descendant (space) or child ('>') combinators, and an optional trailing
// "@attr" naming the attribute to extract instead of text content.
class Selector {
 public:
  static Selector parse(std::string_view expr);

  // Matching nodes strictly inside `scope`, in document order.
  std::vector<const Node*> select(const Node& scope) const;
  // Attribute value or text content for each match; empty values skipped.
  std::vector<std::string> extract(const Node& scope) const;
  const std::optional<std::string>& attribute() const { return attribute_; }

 private:
  struct Compound {
    std::string tag;
    std::string id;
    std::vector<std::string> classes;
    std::vector<std::pair<std::string, std::optional<std::string>>> attrs;
    // Relation to the previous compound: true for '>'.
    bool child_of_previous = false;

    bool matches(const Node& n) const;
  };

  bool matches_chain(const Node& n, std::size_t idx, const Node& scope) const;

  std::vector<Compound> chain_;
  std::optional<std::string> attribute_;
};

}  // namespace forge::html
