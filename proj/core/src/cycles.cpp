#include "mole2d/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <vector>

#include "mole2d/errors.hpp"

namespace mole2d {

const char* basis_kind_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::FcbOdo: return "fcb-odo";
    case BasisKind::FcbMst: return "fcb-mst";
    case BasisKind::Mcb: return "mcb";
  }
  return "?";
}

Eigen::MatrixXd CycleBasisMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(ell(), edge_count);
  for (int r = 0; r < ell(); ++r)
    for (const CircuitEntry& entry : rows[r])
      dense(r, entry.edge) = static_cast<double>(entry.sign);
  return dense;
}

std::vector<long long> CycleBasisMatrix::apply_int(std::span<const long long> edge_vector) const {
  std::vector<long long> out(rows.size(), 0);
  for (size_t r = 0; r < rows.size(); ++r)
    for (const CircuitEntry& entry : rows[r])
      out[r] += static_cast<long long>(entry.sign) * edge_vector[entry.edge];
  return out;
}

Eigen::VectorXd CycleBasisMatrix::apply(const Eigen::VectorXd& edge_vector) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ell());
  for (int r = 0; r < ell(); ++r)
    for (const CircuitEntry& entry : rows[r])
      out[r] += static_cast<double>(entry.sign) * edge_vector[entry.edge];
  return out;
}

double cycle_weight(const Circuit& circuit, const Eigen::VectorXd& variances) {
  double w = 0.0;
  for (const CircuitEntry& entry : circuit)
    w += variances[entry.edge] * std::abs(static_cast<double>(entry.sign));
  return w;
}

double basis_weight(const CycleBasisMatrix& basis, const Eigen::VectorXd& variances) {
  double w = 0.0;
  for (const Circuit& row : basis.rows) w += cycle_weight(row, variances);
  return w;
}

namespace {

int step_sign(const EdgeRecord& e, int from) { return e.tail == from ? +1 : -1; }

// Signed tree path from `a` to `b` appended onto `out` (entries unsorted).
void append_tree_path(const PoseGraph& g, const SpanningTree& tree, int a, int b,
                      Circuit& out) {
  int ua = a, ub = b;
  std::vector<CircuitEntry> down;  // LCA -> b side, collected in reverse
  while (tree.depth[ua] > tree.depth[ub]) {
    const int e = tree.parent_edge[ua];
    out.push_back({e, step_sign(g.edges[e], ua)});
    ua = tree.parent_node[ua];
  }
  while (tree.depth[ub] > tree.depth[ua]) {
    const int e = tree.parent_edge[ub];
    down.push_back({e, step_sign(g.edges[e], tree.parent_node[ub])});
    ub = tree.parent_node[ub];
  }
  while (ua != ub) {
    const int ea = tree.parent_edge[ua];
    out.push_back({ea, step_sign(g.edges[ea], ua)});
    ua = tree.parent_node[ua];
    const int eb = tree.parent_edge[ub];
    down.push_back({eb, step_sign(g.edges[eb], tree.parent_node[ub])});
    ub = tree.parent_node[ub];
  }
  out.insert(out.end(), down.rbegin(), down.rend());
}

void sort_circuit(Circuit& c) {
  std::sort(c.begin(), c.end(),
            [](const CircuitEntry& a, const CircuitEntry& b) { return a.edge < b.edge; });
}

}  // namespace

CycleBasisMatrix fundamental_cycle_basis(const PoseGraph& g, const SpanningTree& tree) {
  CycleBasisMatrix basis;
  basis.kind = tree.strategy == TreeStrategy::Odometric ? BasisKind::FcbOdo
                                                        : BasisKind::FcbMst;
  basis.edge_count = g.m();
  basis.ordering = tree;
  basis.rows.reserve(g.ell());
  for (int chord : tree.chords()) {
    Circuit row;
    row.push_back({chord, +1});
    append_tree_path(g, tree, g.edges[chord].head, g.edges[chord].tail, row);
    sort_circuit(row);
    basis.rows.push_back(std::move(row));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Minimum cycle basis (Horton candidate family + greedy GF(2) selection)
// ---------------------------------------------------------------------------

namespace {

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> parent_node;
  std::vector<int> parent_edge;
  std::vector<int> branch;  // first node after the source on the path
};

ShortestPathTree dijkstra(const PoseGraph& g,
                          const std::vector<std::vector<std::pair<int, int>>>& adj,
                          int source) {
  const int nodes = g.node_count;
  ShortestPathTree sp;
  sp.dist.assign(nodes, std::numeric_limits<double>::infinity());
  sp.parent_node.assign(nodes, -1);
  sp.parent_edge.assign(nodes, -1);
  sp.branch.assign(nodes, -1);

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  std::vector<bool> settled(nodes, false);
  sp.dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (settled[u]) continue;
    settled[u] = true;
    for (auto [v, e] : adj[u]) {
      if (settled[v]) continue;
      const double cand = d + g.variances[e];
      if (cand < sp.dist[v]) {
        sp.dist[v] = cand;
        sp.parent_node[v] = u;
        sp.parent_edge[v] = e;
        queue.push({cand, v});
      } else if (cand == sp.dist[v] &&
                 (u < sp.parent_node[v] ||
                  (u == sp.parent_node[v] && e < sp.parent_edge[v]))) {
        // lexicographic tie-break keeps shortest paths deterministic
        sp.parent_node[v] = u;
        sp.parent_edge[v] = e;
      }
    }
  }

  // Branch labels: process nodes in ascending distance so parents come first.
  std::vector<int> order(nodes);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return sp.dist[a] < sp.dist[b]; });
  for (int v : order) {
    if (v == source || sp.parent_node[v] < 0) continue;
    sp.branch[v] = sp.parent_node[v] == source ? v : sp.branch[sp.parent_node[v]];
  }
  return sp;
}

struct HortonCandidate {
  double weight;
  int source;
  int edge;
};

// Signed circuit of candidate (source, edge): source ~> tail(edge), the edge
// forward, head(edge) ~> source, with both legs running in the shortest-path
// tree of `source`.
Circuit candidate_circuit(const PoseGraph& g, const ShortestPathTree& sp, int source,
                          int edge) {
  Circuit out;
  const int x = g.edges[edge].tail;
  const int y = g.edges[edge].head;
  std::vector<CircuitEntry> leg;  // source -> x, collected bottom-up
  for (int u = x; u != source; u = sp.parent_node[u])
    leg.push_back({sp.parent_edge[u], step_sign(g.edges[sp.parent_edge[u]], sp.parent_node[u])});
  out.insert(out.end(), leg.rbegin(), leg.rend());
  out.push_back({edge, +1});
  for (int u = y; u != source; u = sp.parent_node[u])
    out.push_back({sp.parent_edge[u], step_sign(g.edges[sp.parent_edge[u]], u)});
  sort_circuit(out);
  return out;
}

class Gf2Echelon {
 public:
  explicit Gf2Echelon(int bits) : words_((bits + 63) / 64) {}

  std::vector<std::uint64_t> pack(const Circuit& circuit) const {
    std::vector<std::uint64_t> bits(words_, 0);
    for (const CircuitEntry& entry : circuit)
      bits[entry.edge >> 6] ^= std::uint64_t(1) << (entry.edge & 63);
    return bits;
  }

  // True (and records the pivot) when `bits` is independent of recorded rows.
  bool try_insert(std::vector<std::uint64_t> bits) {
    for (const auto& [lead, row] : pivots_) {
      if ((bits[lead >> 6] >> (lead & 63)) & 1)
        for (size_t w = 0; w < bits.size(); ++w) bits[w] ^= row[w];
    }
    const int lead = leading_bit(bits);
    if (lead < 0) return false;
    pivots_.emplace_back(lead, std::move(bits));
    std::sort(pivots_.begin(), pivots_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return true;
  }

 private:
  static int leading_bit(const std::vector<std::uint64_t>& bits) {
    for (size_t w = 0; w < bits.size(); ++w)
      if (bits[w]) return static_cast<int>(w * 64) + std::countr_zero(bits[w]);
    return -1;
  }

  size_t words_;
  std::vector<std::pair<int, std::vector<std::uint64_t>>> pivots_;
};

std::uint64_t bits_hash(const std::vector<std::uint64_t>& bits) {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL;
  for (std::uint64_t w : bits) {
    h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ULL;
  }
  return h;
}

long long basis_determinant(const CycleBasisMatrix& basis);

}  // namespace

CycleBasisMatrix minimum_cycle_basis(const PoseGraph& g) {
  CycleBasisMatrix basis;
  basis.kind = BasisKind::Mcb;
  basis.edge_count = g.m();
  basis.ordering = spanning_tree(g, TreeStrategy::MinimumUncertainty);
  const int ell = g.ell();
  if (ell == 0) return basis;

  std::vector<std::vector<std::pair<int, int>>> adj(g.node_count);
  for (const EdgeRecord& e : g.edges) {
    adj[e.tail].push_back({e.head, e.id});
    adj[e.head].push_back({e.tail, e.id});
  }

  // Phase 1: candidate weights. A candidate (v, e=(x,y)) survives only when
  // the two shortest-path legs meet solely at v, so its circuit is simple.
  std::vector<HortonCandidate> candidates;
  for (int v = 0; v < g.node_count; ++v) {
    const ShortestPathTree sp = dijkstra(g, adj, v);
    for (const EdgeRecord& e : g.edges) {
      const int x = e.tail, y = e.head;
      if (x == v || y == v) {
        const int other = x == v ? y : x;
        if (sp.parent_node[other] == v && sp.parent_edge[other] == e.id) continue;
        candidates.push_back({sp.dist[other] + g.variances[e.id], v, e.id});
      } else if (sp.branch[x] != sp.branch[y]) {
        candidates.push_back({sp.dist[x] + sp.dist[y] + g.variances[e.id], v, e.id});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return std::tie(a.weight, a.source, a.edge) < std::tie(b.weight, b.source, b.edge);
  });

  // Phase 2: greedy GF(2) selection in ascending weight. Shortest-path trees
  // are recomputed on demand and memoized; duplicates of an already-seen
  // circuit are skipped by exact bitset comparison.
  Gf2Echelon echelon(g.m());
  std::unordered_map<int, ShortestPathTree> sp_cache;
  std::unordered_map<std::uint64_t, std::vector<size_t>> seen_index;
  std::vector<std::vector<std::uint64_t>> seen_bits;

  for (const HortonCandidate& cand : candidates) {
    if (basis.ell() == ell) break;
    auto it = sp_cache.find(cand.source);
    if (it == sp_cache.end()) {
      if (sp_cache.size() > 512) sp_cache.clear();
      it = sp_cache.emplace(cand.source, dijkstra(g, adj, cand.source)).first;
    }
    Circuit circuit = candidate_circuit(g, it->second, cand.source, cand.edge);
    auto bits = echelon.pack(circuit);

    const std::uint64_t h = bits_hash(bits);
    bool duplicate = false;
    for (size_t idx : seen_index[h])
      if (seen_bits[idx] == bits) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    seen_index[h].push_back(seen_bits.size());
    seen_bits.push_back(bits);

    if (echelon.try_insert(std::move(bits))) basis.rows.push_back(std::move(circuit));
  }

  if (basis.ell() != ell)
    raise(Errc::CanonicalizationFailure, "Horton family did not span the cycle space");
  if (std::llabs(basis_determinant(basis)) != 1)
    raise(Errc::CanonicalizationFailure, "minimum cycle basis is not integral");
  return basis;
}

// ---------------------------------------------------------------------------
// Exact integer pseudoinverse
// ---------------------------------------------------------------------------

namespace {

using Wide = __int128;

[[noreturn]] void overflow() {
  raise(Errc::CanonicalizationFailure, "exact elimination overflow");
}

Wide checked_mul(Wide a, Wide b) {
  Wide out;
  if (__builtin_mul_overflow(a, b, &out)) overflow();
  return out;
}

Wide checked_sub(Wide a, Wide b) {
  Wide out;
  if (__builtin_sub_overflow(a, b, &out)) overflow();
  return out;
}

Wide checked_add(Wide a, Wide b) {
  Wide out;
  if (__builtin_add_overflow(a, b, &out)) overflow();
  return out;
}

// Chord-block C_L in canonical order: entry (r, c) is the sign of row r on
// the c-th chord.
std::vector<std::vector<Wide>> chord_block(const CycleBasisMatrix& basis,
                                           const std::vector<int>& chord_edges) {
  const int ell = basis.ell();
  std::vector<int> chord_pos(basis.edge_count, -1);
  for (int c = 0; c < ell; ++c) chord_pos[chord_edges[c]] = c;
  std::vector<std::vector<Wide>> block(ell, std::vector<Wide>(ell, 0));
  for (int r = 0; r < ell; ++r)
    for (const CircuitEntry& entry : basis.rows[r])
      if (chord_pos[entry.edge] >= 0) block[r][chord_pos[entry.edge]] = entry.sign;
  return block;
}

// Fraction-free Gauss-Jordan (Bareiss): returns det(M) and leaves `aug` equal
// to det(M) * M^-1 * aug0. All divisions are exact.
Wide bareiss_jordan(std::vector<std::vector<Wide>>& m, std::vector<std::vector<Wide>>& aug) {
  const int n = static_cast<int>(m.size());
  const int k = n == 0 ? 0 : static_cast<int>(aug[0].size());
  Wide prev = 1;
  int sign = 1;
  for (int p = 0; p < n; ++p) {
    // smallest nonzero pivot keeps the exact intermediates small
    int pivot = -1;
    for (int r = p; r < n; ++r) {
      if (m[r][p] == 0) continue;
      if (pivot < 0 || (m[r][p] < 0 ? -m[r][p] : m[r][p]) <
                           (m[pivot][p] < 0 ? -m[pivot][p] : m[pivot][p]))
        pivot = r;
    }
    if (pivot < 0) return 0;
    if (pivot != p) {
      std::swap(m[pivot], m[p]);
      std::swap(aug[pivot], aug[p]);
      sign = -sign;
    }
    for (int r = 0; r < n; ++r) {
      if (r == p) continue;
      const Wide mrp = m[r][p];
      for (int c = 0; c < n; ++c) {
        if (c == p) continue;
        m[r][c] = checked_sub(checked_mul(m[r][c], m[p][p]), checked_mul(mrp, m[p][c])) / prev;
      }
      for (int c = 0; c < k; ++c)
        aug[r][c] =
            checked_sub(checked_mul(aug[r][c], m[p][p]), checked_mul(mrp, aug[p][c])) / prev;
      m[r][p] = 0;
    }
    prev = m[p][p];
  }
  return n == 0 ? 1 : sign > 0 ? prev : -prev;
}

long long basis_determinant(const CycleBasisMatrix& basis) {
  const std::vector<int> chords = basis.ordering.chords();
  auto block = chord_block(basis, chords);
  std::vector<std::vector<Wide>> aug(block.size());
  const Wide det = bareiss_jordan(block, aug);
  if (det > std::numeric_limits<long long>::max() || det < std::numeric_limits<long long>::min())
    overflow();
  return static_cast<long long>(det);
}

}  // namespace

PseudoinverseApplier::PseudoinverseApplier(const CycleBasisMatrix& basis)
    : basis_(&basis), chord_edges_(basis.ordering.chords()) {
  const int ell = basis.ell();
  if (static_cast<int>(chord_edges_.size()) != ell)
    raise(Errc::CanonicalizationFailure, "ordering does not match the basis dimension");

  auto block = chord_block(basis, chord_edges_);
  identity_block_ = true;
  for (int r = 0; r < ell && identity_block_; ++r)
    for (int c = 0; c < ell && identity_block_; ++c)
      if (block[r][c] != (r == c ? 1 : 0)) identity_block_ = false;
  if (identity_block_) return;

  std::vector<std::vector<Wide>> aug(ell, std::vector<Wide>(ell, 0));
  for (int r = 0; r < ell; ++r) aug[r][r] = 1;
  const Wide det = bareiss_jordan(block, aug);
  if (det == 0) raise(Errc::CanonicalizationFailure, "C_L block is singular");
  if (det != 1 && det != -1)
    raise(Errc::CanonicalizationFailure, "C_L block has non-unit determinant");
  inverse_.assign(ell, std::vector<long long>(ell, 0));
  for (int r = 0; r < ell; ++r)
    for (int c = 0; c < ell; ++c) {
      const Wide v = det > 0 ? aug[r][c] : -aug[r][c];
      if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        overflow();
      inverse_[r][c] = static_cast<long long>(v);
    }
}

std::vector<long long> PseudoinverseApplier::apply(std::span<const long long> gamma) const {
  const int ell = basis_->ell();
  if (static_cast<int>(gamma.size()) != ell)
    raise(Errc::OutOfRange, "gamma length does not match the basis");

  std::vector<long long> k(basis_->edge_count, 0);
  if (identity_block_) {
    for (int c = 0; c < ell; ++c) k[chord_edges_[c]] = gamma[c];
  } else {
    for (int c = 0; c < ell; ++c) {
      Wide acc = 0;
      for (int j = 0; j < ell; ++j)
        acc = checked_add(acc, checked_mul(Wide(inverse_[c][j]), Wide(gamma[j])));
      if (acc > std::numeric_limits<long long>::max() ||
          acc < std::numeric_limits<long long>::min())
        overflow();
      k[chord_edges_[c]] = static_cast<long long>(acc);
    }
  }

  const std::vector<long long> check = basis_->apply_int(k);
  for (int r = 0; r < ell; ++r)
    if (check[r] != gamma[r])
      raise(Errc::CanonicalizationFailure, "C k != gamma after exact solve");
  return k;
}

std::vector<long long> apply_pseudoinverse(const CycleBasisMatrix& basis,
                                           std::span<const long long> gamma) {
  return PseudoinverseApplier(basis).apply(gamma);
}

}  // namespace mole2d
