#include "tarpath/pathspace.hpp"

#include <algorithm>

#include "tarpath/errors.hpp"

namespace tarpath {

ActionAlphabet::ActionAlphabet(std::vector<std::string> tokens, std::string terminal)
    : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2) fail(ErrorKind::InvalidInput, "alphabet needs at least two tokens");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
            fail(ErrorKind::InvalidInput, "duplicate token '" + tokens_[i] + "'");
    }
    auto it = index_.find(terminal);
    if (it == index_.end())
        fail(ErrorKind::InvalidInput, "terminal '" + terminal + "' is not an alphabet token");
    terminal_ = it->second;
}

ActionAlphabet ActionAlphabet::letters(std::size_t size) {
    if (size < 2 || size > 27) fail(ErrorKind::InvalidInput, "letter alphabet size must be in [2, 27]");
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i + 1 < size; ++i) tokens.emplace_back(1, static_cast<char>('a' + i));
    tokens.emplace_back(kDefaultTerminal);
    return ActionAlphabet(std::move(tokens), std::string(kDefaultTerminal));
}

TokenId ActionAlphabet::id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) fail(ErrorKind::InvalidInput, "unknown token '" + std::string(name) + "'");
    return it->second;
}

const std::string& ActionAlphabet::name(TokenId t) const {
    check(t);
    return tokens_[t];
}

void ActionAlphabet::check(TokenId t) const {
    if (!contains(t)) fail(ErrorKind::InvalidInput, "token id " + std::to_string(t) + " out of range");
}

SeqClass classify(const ActionAlphabet& alphabet, const PathSeq& seq) {
    bool seen_terminal = false;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        alphabet.check(seq[i]);
        if (alphabet.is_terminal(seq[i])) {
            if (i + 1 != seq.size()) seen_terminal = true;
        }
    }
    if (seen_terminal) {
        return SeqClass::Improper;
    }
    if (!seq.empty() && alphabet.is_terminal(seq.elems.back())) return SeqClass::Complete;
    return SeqClass::ProperIncomplete;
}

PathSeq append(const ActionAlphabet& alphabet, const PathSeq& seq, TokenId a) {
    alphabet.check(a);
    PathSeq out = seq;
    out.elems.push_back(a);
    return out;
}

PathSeq encode(const ActionAlphabet& alphabet, std::span<const std::string> names) {
    PathSeq out;
    out.elems.reserve(names.size());
    for (const auto& n : names) out.elems.push_back(alphabet.id(n));
    return out;
}

std::vector<std::string> decode(const ActionAlphabet& alphabet, const PathSeq& seq) {
    std::vector<std::string> out;
    out.reserve(seq.size());
    for (TokenId t : seq) out.push_back(alphabet.name(t));
    return out;
}

std::string format(const ActionAlphabet& alphabet, const PathSeq& seq) {
    std::string out = "(";
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += ", ";
        out += alphabet.name(seq[i]);
    }
    return out + ")";
}

PrefixTrie::PrefixTrie(std::size_t alphabet_size) : alphabet_size_(alphabet_size) {
    nodes_.push_back(Node{});
    children_.assign(alphabet_size_, npos);
}

PrefixTrie PrefixTrie::build(const ActionAlphabet& alphabet, std::span<const PathSeq> paths) {
    PrefixTrie trie(alphabet.size());
    for (const auto& p : paths) {
        if (classify(alphabet, p) != SeqClass::Complete)
            fail(ErrorKind::InvalidInput, "trie input " + format(alphabet, p) + " is not a complete sequence");
        trie.insert(p);
    }
    return trie;
}

PrefixTrie::NodeId PrefixTrie::find(const PathSeq& seq) const {
    NodeId n = root();
    for (TokenId t : seq) {
        if (t >= alphabet_size_) return npos;
        n = child(n, t);
        if (n == npos) return npos;
    }
    return n;
}

PrefixTrie::NodeId PrefixTrie::insert(const PathSeq& seq) {
    NodeId n = root();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const TokenId t = seq[i];
        const std::size_t slot = static_cast<std::size_t>(n) * alphabet_size_ + t;
        if (children_[slot] == npos) {
            const auto id = static_cast<NodeId>(nodes_.size());
            nodes_.push_back(Node{seq.prefix(i + 1), n, t});
            children_.resize(children_.size() + alphabet_size_, npos);
            children_[slot] = id;
        }
        n = children_[slot];
    }
    max_depth_ = std::max(max_depth_, seq.size());
    return n;
}

}  // namespace tarpath
