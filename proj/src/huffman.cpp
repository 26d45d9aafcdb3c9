#include "sfrl/huffman.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <tuple>

#include "sfrl/error.hpp"

namespace sfrl {

namespace {

struct Node {
  double prob;
  std::size_t min_symbol;
  std::size_t id;
};

struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    return std::tie(a.prob, a.min_symbol) > std::tie(b.prob, b.min_symbol);
  }
};

}  // namespace

HuffmanCode::HuffmanCode(const Distribution& pmf)
    : lengths_(pmf.size(), 0), codes_(pmf.size(), 0), present_(pmf.size(), false) {
  std::priority_queue<Node, std::vector<Node>, NodeAfter> heap;
  // parent_[id] for leaves 0..n-1 and internal nodes n..
  std::vector<std::size_t> parent(pmf.size(), 0);
  std::size_t positive = 0;
  for (std::size_t s = 0; s < pmf.size(); ++s) {
    if (pmf[s] > 0.0) {
      present_[s] = true;
      heap.push({pmf[s], s, s});
      ++positive;
    }
  }
  if (positive == 0) throw ValidationError("huffman_build: pmf has no positive mass");
  std::size_t next_id = pmf.size();
  while (heap.size() > 1) {
    Node a = heap.top();
    heap.pop();
    Node b = heap.top();
    heap.pop();
    parent.push_back(0);
    parent[a.id] = next_id;
    parent[b.id] = next_id;
    heap.push({a.prob + b.prob, std::min(a.min_symbol, b.min_symbol), next_id});
    ++next_id;
  }
  const std::size_t root = heap.top().id;
  for (std::size_t s = 0; s < pmf.size(); ++s) {
    if (!present_[s]) continue;
    unsigned depth = 0;
    for (std::size_t v = s; v != root; v = parent[v]) ++depth;
    if (depth > 64) throw DomainError("huffman_build: codeword longer than 64 bits");
    lengths_[s] = depth;
  }

  for (std::size_t s = 0; s < pmf.size(); ++s) {
    if (present_[s]) order_.push_back(s);
  }
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return lengths_[a] < lengths_[b]; });
  std::uint64_t code = 0;
  unsigned prev_len = lengths_[order_.front()];
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const std::size_t s = order_[i];
    if (i > 0) code = (code + 1) << (lengths_[s] - prev_len);
    codes_[s] = code;
    prev_len = lengths_[s];
    expected_length_ += pmf[s] * lengths_[s];
  }
}

unsigned HuffmanCode::length_of(std::size_t symbol) const {
  if (symbol >= lengths_.size() || !present_[symbol]) {
    throw DomainError("Huffman: symbol " + std::to_string(symbol) + " has no codeword");
  }
  return lengths_[symbol];
}

void HuffmanCode::encode_to(std::size_t symbol, BitString& out) const {
  out.append(codes_[symbol], length_of(symbol));
}

BitString HuffmanCode::encode(std::size_t symbol) const {
  BitString b;
  encode_to(symbol, b);
  return b;
}

BitString HuffmanCode::codeword(std::size_t symbol) const { return encode(symbol); }

std::size_t HuffmanCode::decode(BitReader& in) const {
  const std::size_t start = in.position();
  std::uint64_t v = 0;
  unsigned len = 0;
  // Canonical codes of one length are consecutive integers.
  for (std::size_t i = 0; i < order_.size();) {
    const unsigned target = lengths_[order_[i]];
    while (len < target) {
      if (in.at_end()) throw FramingError("truncated Huffman codeword", in.position());
      v = (v << 1) | static_cast<std::uint64_t>(in.read_bit());
      ++len;
    }
    std::size_t j = i;
    while (j < order_.size() && lengths_[order_[j]] == target) ++j;
    const std::uint64_t first = codes_[order_[i]];
    if (v >= first && v - first < j - i) return order_[i + (v - first)];
    i = j;
  }
  throw FramingError("invalid Huffman codeword", start);
}

HuffmanCode huffman_build(const Distribution& pmf) { return HuffmanCode(pmf); }

}  // namespace sfrl
