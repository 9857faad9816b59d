#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tarpath {

/// Index of a token within its alphabet's declaration order.
using TokenId = std::uint32_t;

/// Finite action alphabet with one distinguished terminal token.
///
/// Token order is the declaration order and is the tie-break order for every
/// argmax in the library.
class ActionAlphabet {
public:
    static constexpr std::string_view kDefaultTerminal = "END";

    /// Throws InvalidInput unless tokens are distinct, at least two, and contain terminal.
    ActionAlphabet(std::vector<std::string> tokens, std::string terminal);

    /// Letters "a", "b", ... followed by "END"; `size` counts the terminal.
    static ActionAlphabet letters(std::size_t size);

    [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }
    [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    [[nodiscard]] const std::string& terminal_name() const noexcept { return tokens_[terminal_]; }
    [[nodiscard]] TokenId terminal() const noexcept { return terminal_; }
    [[nodiscard]] bool is_terminal(TokenId t) const noexcept { return t == terminal_; }
    [[nodiscard]] bool contains(TokenId t) const noexcept { return t < tokens_.size(); }

    [[nodiscard]] TokenId id(std::string_view name) const;
    [[nodiscard]] const std::string& name(TokenId t) const;

    /// Throws InvalidInput if `t` is not a token of this alphabet.
    void check(TokenId t) const;

    friend bool operator==(const ActionAlphabet& a, const ActionAlphabet& b) {
        return a.tokens_ == b.tokens_ && a.terminal_ == b.terminal_;
    }

private:
    std::vector<std::string> tokens_;
    TokenId terminal_ = 0;
    std::unordered_map<std::string, TokenId> index_;
};

/// A token sequence, possibly empty. Ordered lexicographically by token id.
struct PathSeq {
    std::vector<TokenId> elems;

    PathSeq() = default;
    explicit PathSeq(std::vector<TokenId> e) : elems(std::move(e)) {}
    PathSeq(std::initializer_list<TokenId> e) : elems(e) {}

    [[nodiscard]] std::size_t size() const noexcept { return elems.size(); }
    [[nodiscard]] bool empty() const noexcept { return elems.empty(); }
    [[nodiscard]] TokenId operator[](std::size_t i) const { return elems[i]; }
    [[nodiscard]] auto begin() const noexcept { return elems.begin(); }
    [[nodiscard]] auto end() const noexcept { return elems.end(); }

    /// First `k` elements.
    [[nodiscard]] PathSeq prefix(std::size_t k) const {
        return PathSeq(std::vector<TokenId>(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(k)));
    }

    friend auto operator<=>(const PathSeq&, const PathSeq&) = default;
    friend bool operator==(const PathSeq&, const PathSeq&) = default;
};

enum class SeqClass { Complete, ProperIncomplete, Improper };

/// Complete: nonempty, terminal last and nowhere else. ProperIncomplete: no
/// terminal at all. Improper: anything else. Throws InvalidInput on unknown tokens.
[[nodiscard]] SeqClass classify(const ActionAlphabet& alphabet, const PathSeq& seq);

/// Complete or ProperIncomplete.
[[nodiscard]] inline bool is_proper(SeqClass c) noexcept { return c != SeqClass::Improper; }

/// `seq ⊕ a`. Throws InvalidInput on an unknown token.
[[nodiscard]] PathSeq append(const ActionAlphabet& alphabet, const PathSeq& seq, TokenId a);

/// Parses token names. Throws InvalidInput on unknown names.
[[nodiscard]] PathSeq encode(const ActionAlphabet& alphabet, std::span<const std::string> names);
[[nodiscard]] std::vector<std::string> decode(const ActionAlphabet& alphabet, const PathSeq& seq);

/// Human-readable "(a, b, END)".
[[nodiscard]] std::string format(const ActionAlphabet& alphabet, const PathSeq& seq);

/// Prefix trie over a finite set of complete paths.
///
/// Node ids are assigned in insertion order, so a parent id is always smaller
/// than any of its children's ids; reverse id order is a valid bottom-up sweep.
class PrefixTrie {
public:
    using NodeId = std::int32_t;
    static constexpr NodeId npos = -1;

    /// Trie holding only the empty sequence.
    explicit PrefixTrie(std::size_t alphabet_size);

    /// Throws InvalidInput if any path is not Complete.
    static PrefixTrie build(const ActionAlphabet& alphabet, std::span<const PathSeq> paths);

    [[nodiscard]] NodeId root() const noexcept { return 0; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t alphabet_size() const noexcept { return alphabet_size_; }

    [[nodiscard]] const PathSeq& path(NodeId n) const { return nodes_[static_cast<std::size_t>(n)].path; }
    [[nodiscard]] NodeId parent(NodeId n) const { return nodes_[static_cast<std::size_t>(n)].parent; }
    /// Token on the edge into `n`; meaningless for the root.
    [[nodiscard]] TokenId edge_token(NodeId n) const { return nodes_[static_cast<std::size_t>(n)].token; }

    [[nodiscard]] NodeId child(NodeId n, TokenId t) const {
        return children_[static_cast<std::size_t>(n) * alphabet_size_ + t];
    }

    /// Node holding exactly `seq`, or npos.
    [[nodiscard]] NodeId find(const PathSeq& seq) const;

    /// Length of the longest stored path.
    [[nodiscard]] std::size_t max_depth() const noexcept { return max_depth_; }

    /// Inserts `seq` and all its prefixes; returns the node of `seq`.
    NodeId insert(const PathSeq& seq);

private:
    struct Node {
        PathSeq path;
        NodeId parent = npos;
        TokenId token = 0;
    };

    std::size_t alphabet_size_;
    std::vector<Node> nodes_;
    std::vector<NodeId> children_;  // row-major [node][token]
    std::size_t max_depth_ = 0;
};

}  // namespace tarpath
