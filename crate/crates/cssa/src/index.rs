//! The user-facing index: compressed SSAs relative to a stored SA, multi-seed
//! collections with a reference tree, and relative SAs for edited documents.
//!
//! A compressed SSA stores `base⁻¹ ∘ SSA` as a [`RelativePermutation`] over
//! its minimal increasing partition, so `SSA[i] = base[rel.access(i)]`. The
//! base is the SA or another SSA; chains resolve by name through the
//! collection. For a multi-seed collection the reference tree is planned as
//! a minimum spanning arborescence over estimated pairwise sizes, rooted at
//! the SA.

use std::sync::Arc;

use thiserror::Error;

use crate::par::*;
use crate::perm::{partition_increasing, PermError, Permutation};
use crate::relperm::{
    ReferenceBundle, RelPermError, RelativePermutation, SizeReport, SubPermMode,
};
use crate::succinct::{bits_for, RsBitvector, SizeBits};
use crate::suffix::{build_sa, build_ssa_with_sa, SpacedSuffixArray, SuffixArray};
use crate::text::{SpacedSeed, Text};

/// Reserved name of the root permutation in every collection.
pub const SA_NAME: &str = "SA";

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("suffix arrays built on different texts: {left:?} vs {right:?}")]
    TextMismatch { left: String, right: String },
    #[error("entry {name:?} not found in collection")]
    UnknownEntry { name: String },
    #[error("reference {name:?} does not resolve (missing or cyclic)")]
    DanglingReference { name: String },
    #[error("index {i} out of range for length {n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("cost matrix incomplete: expected {expected} entries, got {got}")]
    IncompleteCosts { expected: usize, got: usize },
    #[error("matching is not strictly increasing in both coordinates (pair {0})")]
    NonMonotoneMatching(usize),
    #[error("matched elements do not have the same relative order on both sides")]
    OrderMismatch,
    #[error("duplicate entry name {0:?}")]
    DuplicateEntry(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    RelPerm(#[from] RelPermError),
}

/// An SSA stored relative to a named base permutation.
#[derive(Debug, Clone)]
pub struct CompressedSsa {
    base: String,
    rel: RelativePermutation,
    seed_spec: String,
    rho: usize,
}

impl CompressedSsa {
    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn seed_spec(&self) -> &str {
        &self.seed_spec
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn rel(&self) -> &RelativePermutation {
        &self.rel
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn size_report(&self) -> SizeReport {
        self.rel.size_report()
    }

    pub fn from_parts(
        base: impl Into<String>,
        rel: RelativePermutation,
        seed_spec: impl Into<String>,
    ) -> Self {
        let rho = rel.rho();
        Self {
            base: base.into(),
            rel,
            seed_spec: seed_spec.into(),
            rho,
        }
    }
}

/// Compresses `target` against `base`: composes `base⁻¹ ∘ target`, takes the
/// minimal increasing partition, and encodes every subsequence as identity.
pub fn compress_relative(
    base: &Permutation,
    target: &Permutation,
) -> Result<RelativePermutation, IndexError> {
    let p = Permutation::compose(&base.inverse(), target)?;
    let part = partition_increasing(&p);
    Ok(RelativePermutation::encode_increasing(
        &p,
        part.labels(),
        part.rho(),
    )?)
}

/// Compresses an SSA relative to the SA of the same text.
pub fn compress_ssa(
    sa: &SuffixArray,
    ssa: &SpacedSuffixArray,
) -> Result<CompressedSsa, IndexError> {
    if sa.text_ref() != ssa.text_ref() {
        return Err(IndexError::TextMismatch {
            left: sa.text_ref().to_string(),
            right: ssa.text_ref().to_string(),
        });
    }
    let rel = compress_relative(sa.order(), ssa.order())?;
    Ok(CompressedSsa::from_parts(SA_NAME, rel, ssa.seed_spec()))
}

/// How the reference tree of a collection is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreePolicy {
    /// Every entry compressed relative to the SA.
    #[default]
    Star,
    /// Minimum spanning arborescence over directed estimated costs
    /// (Chu-Liu/Edmonds), rooted at the SA.
    MstDirected,
    /// Undirected minimum spanning tree (Prim) on the same costs, oriented
    /// away from the SA.
    MstUndirected,
}

/// A named set of compressed SSAs over one text, all reachable from the SA.
#[derive(Debug, Clone)]
pub struct SeedCollection {
    sa: SuffixArray,
    entries: Vec<(String, CompressedSsa)>,
    sigma: u16,
}

impl SeedCollection {
    pub fn new(sa: SuffixArray, sigma: u16) -> Self {
        Self {
            sa,
            entries: Vec::new(),
            sigma,
        }
    }

    /// Builds a collection for `text` and `seeds` under the given tree
    /// policy. Entries are named by their normalized seed spec.
    pub fn build(
        text: &Text,
        seeds: &[SpacedSeed],
        policy: TreePolicy,
        max_depth: usize,
    ) -> Result<Self, IndexError> {
        for (i, s) in seeds.iter().enumerate() {
            if seeds[..i].iter().any(|t| t.spec() == s.spec()) {
                return Err(IndexError::DuplicateEntry(s.spec().to_string()));
            }
        }
        let sa = build_sa(text);
        let ssas: Vec<SpacedSuffixArray> = seeds
            .iter()
            .map(|s| build_ssa_with_sa(text, s, &sa))
            .collect();

        let parents: Vec<usize> = match policy {
            TreePolicy::Star => vec![0; ssas.len()],
            _ => {
                let orders: Vec<&Permutation> = ssas.iter().map(|s| s.order()).collect();
                let costs = CostMatrix::estimate(sa.order(), &orders)?;
                plan_reference_tree(&costs, policy, max_depth)?.parents
            }
        };

        let mut coll = Self::new(sa, text.sigma());
        for (k, ssa) in ssas.iter().enumerate() {
            let (base_name, base_order) = if parents[k] == 0 {
                (SA_NAME.to_string(), coll.sa.order())
            } else {
                let p = parents[k] - 1;
                (ssas[p].seed_spec().to_string(), ssas[p].order())
            };
            let rel = compress_relative(base_order, ssa.order())?;
            coll.entries.push((
                ssa.seed_spec().to_string(),
                CompressedSsa::from_parts(base_name, rel, ssa.seed_spec()),
            ));
        }
        Ok(coll)
    }

    pub fn sa(&self) -> &SuffixArray {
        &self.sa
    }

    pub fn sigma(&self) -> u16 {
        self.sigma
    }

    pub fn text_len(&self) -> usize {
        self.sa.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &CompressedSsa)> {
        self.entries.iter().map(|(n, c)| (n.as_str(), c))
    }

    pub fn get(&self, name: &str) -> Option<&CompressedSsa> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
    }

    pub fn insert(&mut self, name: impl Into<String>, entry: CompressedSsa) -> Result<(), IndexError> {
        let name = name.into();
        if name == SA_NAME || self.get(&name).is_some() {
            return Err(IndexError::DuplicateEntry(name));
        }
        self.entries.push((name, entry));
        Ok(())
    }

    /// Random access to the named entry, resolving base references through
    /// the collection; `SA_NAME` addresses the stored suffix array itself.
    pub fn access(&self, name: &str, i: usize) -> Result<usize, IndexError> {
        if name == SA_NAME {
            if i >= self.sa.len() {
                return Err(IndexError::IndexOutOfRange {
                    i,
                    n: self.sa.len(),
                });
            }
            return Ok(self.sa.get(i));
        }
        let entry = self.get(name).ok_or_else(|| IndexError::UnknownEntry {
            name: name.to_string(),
        })?;
        self.access_entry(entry, i)
    }

    /// Random access through a compressed SSA whose base names resolve in
    /// this collection.
    pub fn access_entry(&self, entry: &CompressedSsa, i: usize) -> Result<usize, IndexError> {
        let mut hops = 0usize;
        let mut cur = entry;
        let mut k = match cur.rel.access(i) {
            Ok(k) => k,
            Err(RelPermError::IndexOutOfRange { i, n }) => {
                return Err(IndexError::IndexOutOfRange { i, n })
            }
            Err(e) => return Err(e.into()),
        };
        loop {
            if cur.base == SA_NAME {
                return Ok(self.sa.get(k));
            }
            hops += 1;
            if hops > self.entries.len() {
                return Err(IndexError::DanglingReference {
                    name: cur.base.clone(),
                });
            }
            cur = self
                .get(&cur.base)
                .ok_or_else(|| IndexError::DanglingReference {
                    name: cur.base.clone(),
                })?;
            k = cur.rel.access(k)?;
        }
    }

    /// Hops from an entry to the SA along base references.
    pub fn depth(&self, name: &str) -> Result<usize, IndexError> {
        let mut depth = 0usize;
        let mut cur = name;
        while cur != SA_NAME {
            let entry = self.get(cur).ok_or_else(|| IndexError::DanglingReference {
                name: cur.to_string(),
            })?;
            depth += 1;
            if depth > self.entries.len() {
                return Err(IndexError::DanglingReference {
                    name: cur.to_string(),
                });
            }
            cur = entry.base();
        }
        Ok(depth)
    }
}

/// Projected size of storing one permutation relative to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostEstimate {
    pub rho: usize,
    /// `2 n ceil(lg rho)`: the two label sequences.
    pub payload_bits: usize,
    /// Projected rank/select directory bits at the same level count.
    pub overhead_bits: usize,
}

impl CostEstimate {
    pub fn total_bits(&self) -> usize {
        self.payload_bits + self.overhead_bits
    }
}

/// Estimates the size of storing `b` relative to `a` without encoding:
/// partitions `a⁻¹ ∘ b` and projects the label-sequence footprint.
pub fn estimate_pair_cost(a: &Permutation, b: &Permutation) -> Result<CostEstimate, IndexError> {
    let p = Permutation::compose(&a.inverse(), b)?;
    let rho = partition_increasing(&p).rho();
    let levels = bits_for(rho);
    Ok(CostEstimate {
        rho,
        payload_bits: 2 * p.len() * levels,
        overhead_bits: 2 * levels * RsBitvector::directory_bits_for_len(p.len()),
    })
}

/// All pairwise cost estimates for a root permutation and `k` entries.
/// Node 0 is the root; nodes `1..=k` are the entries.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    /// `cost[u][v-1]` = estimated bits for entry `v` relative to node `u`.
    cost: Vec<Vec<u64>>,
    num_entries: usize,
}

impl CostMatrix {
    /// Estimates every directed pair, in parallel. Entries relative to the
    /// root and to each other entry; the root is never compressed.
    pub fn estimate(root: &Permutation, entries: &[&Permutation]) -> Result<Self, IndexError> {
        let k = entries.len();
        let nodes: Vec<&Permutation> = std::iter::once(root).chain(entries.iter().copied()).collect();
        let rows: Vec<Result<Vec<u64>, IndexError>> = (0..=k)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&u| {
                (1..=k)
                    .map(|v| {
                        if u == v {
                            Ok(u64::MAX)
                        } else {
                            estimate_pair_cost(nodes[u], nodes[v])
                                .map(|c| c.total_bits() as u64)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut cost = Vec::with_capacity(k + 1);
        for row in rows {
            cost.push(row?);
        }
        Ok(Self {
            cost,
            num_entries: k,
        })
    }

    /// Builds from explicit costs: `cost[u][v-1]` for parent `u`, child `v`.
    pub fn from_costs(cost: Vec<Vec<u64>>) -> Result<Self, IndexError> {
        let k = cost.len().saturating_sub(1);
        for (u, row) in cost.iter().enumerate() {
            if row.len() != k {
                return Err(IndexError::IncompleteCosts {
                    expected: k,
                    got: row.len(),
                });
            }
            let _ = u;
        }
        if cost.is_empty() {
            return Err(IndexError::IncompleteCosts {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self {
            cost,
            num_entries: k,
        })
    }

    pub fn num_entries(&self) -> usize {
        self.num_entries
    }

    /// Cost of parenting entry-node `v` (1-based) under node `u`.
    pub fn get(&self, u: usize, v: usize) -> u64 {
        debug_assert!(v >= 1 && v <= self.num_entries);
        self.cost[u][v - 1]
    }
}

/// A planned reference tree over a collection's entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferencePlan {
    /// Parent node per entry (1-based entry nodes; parent 0 is the SA).
    pub parents: Vec<usize>,
    /// Hops to the SA per entry, same order.
    pub depths: Vec<usize>,
    pub total_cost_bits: u64,
    pub star_cost_bits: u64,
}

/// Plans the reference tree under `policy`, capping chain depth at
/// `max_depth` (nodes that would sit deeper are re-parented to the cheapest
/// shallow node). Falls back to the star when re-parenting would cost more
/// than the star does.
pub fn plan_reference_tree(
    costs: &CostMatrix,
    policy: TreePolicy,
    max_depth: usize,
) -> Result<ReferencePlan, IndexError> {
    assert!(max_depth >= 1, "chain depth cap must allow direct children");
    let k = costs.num_entries();
    let star_cost: u64 = (1..=k).map(|v| costs.get(0, v)).sum();
    if k == 0 {
        return Ok(ReferencePlan {
            parents: Vec::new(),
            depths: Vec::new(),
            total_cost_bits: 0,
            star_cost_bits: 0,
        });
    }

    let mut parents = match policy {
        TreePolicy::Star => vec![0; k],
        TreePolicy::MstDirected => min_arborescence(costs),
        TreePolicy::MstUndirected => prim_oriented(costs),
    };

    cap_depth(&mut parents, costs, max_depth);

    let total: u64 = parents
        .iter()
        .enumerate()
        .map(|(v0, &u)| costs.get(u, v0 + 1))
        .sum();
    let (parents, total) = if total > star_cost {
        (vec![0; k], star_cost)
    } else {
        (parents, total)
    };

    let depths = depths_of(&parents);
    Ok(ReferencePlan {
        parents,
        depths,
        total_cost_bits: total,
        star_cost_bits: star_cost,
    })
}

fn depths_of(parents: &[usize]) -> Vec<usize> {
    let k = parents.len();
    let mut depths = vec![0usize; k];
    for v in 1..=k {
        let mut d = 0;
        let mut cur = v;
        while cur != 0 {
            cur = parents[cur - 1];
            d += 1;
            assert!(d <= k, "reference tree has a cycle");
        }
        depths[v - 1] = d;
    }
    depths
}

/// Re-parents nodes deeper than `max_depth` onto the cheapest node already
/// finalized at depth below the cap, processing in breadth-first order so
/// the result stays a tree.
#[allow(clippy::needless_range_loop)]
fn cap_depth(parents: &mut [usize], costs: &CostMatrix, max_depth: usize) {
    let k = parents.len();
    let mut depth = vec![usize::MAX; k + 1];
    depth[0] = 0;
    let mut order: Vec<usize> = Vec::with_capacity(k);
    // Breadth-first over the original tree.
    let mut frontier = vec![0usize];
    while let Some(u) = frontier.pop() {
        let mut next = Vec::new();
        for v in 1..=k {
            if parents[v - 1] == u && depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                order.push(v);
                next.push(v);
            }
        }
        frontier.extend(next);
        frontier.sort_unstable();
        frontier.reverse(); // pop smallest id first for determinism
    }
    for v in order {
        let d = depth[parents[v - 1]] + 1;
        if d > max_depth {
            // Cheapest finalized parent with room below the cap; the SA
            // (depth 0) always qualifies.
            let mut best = 0usize;
            let mut best_cost = costs.get(0, v);
            for u in 1..=k {
                if u != v && depth[u] < max_depth && depth[u] != usize::MAX {
                    let c = costs.get(u, v);
                    if c < best_cost {
                        best = u;
                        best_cost = c;
                    }
                }
            }
            parents[v - 1] = best;
            depth[v] = depth[best] + 1;
        } else {
            depth[v] = d;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    weight: u64,
    orig: (usize, usize),
}

/// Minimum spanning arborescence rooted at node 0 (Chu-Liu/Edmonds),
/// returned as parent per entry node.
fn min_arborescence(costs: &CostMatrix) -> Vec<usize> {
    let k = costs.num_entries();
    let mut edges = Vec::with_capacity((k + 1) * k);
    for u in 0..=k {
        for v in 1..=k {
            if u != v {
                edges.push(Edge {
                    from: u,
                    to: v,
                    weight: costs.get(u, v),
                    orig: (u, v),
                });
            }
        }
    }
    let chosen = edmonds(k + 1, 0, edges);
    let mut parents = vec![0usize; k];
    for (u, v) in chosen {
        parents[v - 1] = u;
    }
    parents
}

/// Recursive cycle-contracting Edmonds. Every node except the root must have
/// at least one incoming edge (always true for complete cost matrices).
/// Returns the chosen original (parent, child) pairs.
fn edmonds(num_nodes: usize, root: usize, edges: Vec<Edge>) -> Vec<(usize, usize)> {
    // Cheapest incoming edge per node.
    let mut best: Vec<Option<Edge>> = vec![None; num_nodes];
    for e in &edges {
        if e.to != root && e.from != e.to {
            match best[e.to] {
                Some(b) if b.weight <= e.weight => {}
                _ => best[e.to] = Some(*e),
            }
        }
    }

    // Find a cycle among the chosen in-edges, if any.
    let mut cycle: Option<Vec<usize>> = None;
    let mut state = vec![0u8; num_nodes]; // 0 unvisited, 1 on path, 2 done
    for start in 0..num_nodes {
        if state[start] != 0 || start == root {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while v != root && state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = best[v].expect("non-root node without in-edge").from;
        }
        if v != root && state[v] == 1 {
            let pos = path.iter().position(|&x| x == v).unwrap();
            cycle = Some(path[pos..].to_vec());
        }
        for &x in &path {
            state[x] = 2;
        }
        if cycle.is_some() {
            break;
        }
    }

    let cycle = match cycle {
        None => {
            return (0..num_nodes)
                .filter(|&v| v != root)
                .map(|v| best[v].unwrap().orig)
                .collect()
        }
        Some(c) => c,
    };

    // Contract the cycle: compact ids for the survivors, one fresh id for
    // the whole cycle. Edge origins carry through unchanged, so the
    // recursion keeps answering in original node ids.
    let in_cycle: Vec<bool> = {
        let mut m = vec![false; num_nodes];
        for &v in &cycle {
            m[v] = true;
        }
        m
    };
    let mut new_id = vec![usize::MAX; num_nodes];
    let mut next = 0usize;
    for v in 0..num_nodes {
        if !in_cycle[v] {
            new_id[v] = next;
            next += 1;
        }
    }
    let super_node = next;
    for &v in &cycle {
        new_id[v] = super_node;
    }

    let mut contracted = Vec::new();
    // Edges entering the supernode, keyed by their carried original pair, so
    // the recursion's choice maps back to the local entry point.
    let mut entering: Vec<((usize, usize), usize)> = Vec::new();
    for e in &edges {
        let (nf, nt) = (new_id[e.from], new_id[e.to]);
        if nf == nt {
            continue;
        }
        let weight = if nt == super_node {
            // Entering the cycle at e.to displaces the cycle edge into it.
            entering.push((e.orig, e.to));
            e.weight - best[e.to].unwrap().weight
        } else {
            e.weight
        };
        contracted.push(Edge {
            from: nf,
            to: nt,
            weight,
            orig: e.orig,
        });
    }

    let chosen = edmonds(super_node + 1, new_id[root], contracted);

    // The edge entering the supernode replaces one cycle in-edge; the rest
    // of the cycle keeps its chosen in-edges.
    let mut result = Vec::with_capacity(num_nodes - 1);
    let mut entry_point = None;
    for pair in chosen {
        if let Some(&(_, local)) = entering.iter().find(|(orig, _)| *orig == pair) {
            entry_point = Some(local);
        }
        result.push(pair);
    }
    let entry = entry_point.expect("supernode must have a parent");
    for &v in &cycle {
        if v != entry {
            result.push(best[v].unwrap().orig);
        }
    }
    result
}

/// Prim's MST on the (symmetric) costs, oriented away from the root.
#[allow(clippy::needless_range_loop)]
fn prim_oriented(costs: &CostMatrix) -> Vec<usize> {
    let k = costs.num_entries();
    let weight = |a: usize, b: usize| -> u64 {
        // Undirected weight of {a, b}; node 0 has no incoming cost.
        let ab = if b >= 1 { costs.get(a, b) } else { u64::MAX };
        let ba = if a >= 1 { costs.get(b, a) } else { u64::MAX };
        ab.min(ba)
    };
    let mut in_tree = vec![false; k + 1];
    in_tree[0] = true;
    let mut parents = vec![0usize; k];
    let mut best_edge: Vec<(u64, usize)> = vec![(u64::MAX, 0); k + 1];
    for v in 1..=k {
        best_edge[v] = (weight(0, v), 0);
    }
    for _ in 0..k {
        let mut pick = None;
        for v in 1..=k {
            if !in_tree[v] {
                match pick {
                    None => pick = Some(v),
                    Some(p) if best_edge[v] < best_edge[p] => pick = Some(v),
                    _ => {}
                }
            }
        }
        let v = pick.unwrap();
        in_tree[v] = true;
        parents[v - 1] = best_edge[v].1;
        for w in 1..=k {
            if !in_tree[w] {
                let c = weight(v, w);
                if (c, v) < best_edge[w] {
                    best_edge[w] = (c, v);
                }
            }
        }
    }
    parents
}

/// The SA of an edited document stored against the SA of the original: the
/// shared subsequence resolves through the reference, the complement is
/// stored explicitly.
#[derive(Debug, Clone)]
pub struct RelativeDocumentSa {
    reference: Arc<ReferenceBundle>,
    target: RelativePermutation,
}

impl RelativeDocumentSa {
    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn access(&self, i: usize) -> Result<usize, IndexError> {
        Ok(self.target.access(i)?)
    }

    pub fn reference(&self) -> &ReferenceBundle {
        &self.reference
    }

    pub fn target(&self) -> &RelativePermutation {
        &self.target
    }

    pub(crate) fn from_parts(reference: Arc<ReferenceBundle>, target: RelativePermutation) -> Self {
        Self { reference, target }
    }

    pub fn explicit_entries(&self) -> usize {
        self.target.explicit_entries()
    }

    /// Everything stored beyond the reference permutation itself: the four
    /// label sequences plus the explicit entries. `n` is the edited
    /// document's length, so `bpc()` reads as delta bits per target
    /// character.
    pub fn delta_size(&self) -> SizeReport {
        let t = self.target.size_report();
        let r: SizeBits = self.reference.size_bits();
        SizeReport {
            payload_bits: t.payload_bits + r.payload,
            overhead_bits: t.overhead_bits + r.overhead,
            explicit_bits: t.explicit_bits,
            n: self.target.len(),
        }
    }
}

/// Encodes the SA `pi` of an edited document against the SA `reference` of
/// the original, given a matching of positions `(in pi, in reference)` that
/// is strictly increasing in both coordinates and pairs elements with
/// identical relative value order (both are verified).
pub fn compress_relative_document_sa(
    pi: &SuffixArray,
    reference: &SuffixArray,
    matching: &[(usize, usize)],
) -> Result<RelativeDocumentSa, IndexError> {
    let n = pi.len();
    let n_ref = reference.len();
    for (k, &(a, b)) in matching.iter().enumerate() {
        let in_range = a < n && b < n_ref;
        let monotone =
            k == 0 || (a > matching[k - 1].0 && b > matching[k - 1].1);
        if !in_range || !monotone {
            return Err(IndexError::NonMonotoneMatching(k));
        }
    }
    // Matched elements must have the same relative order by value.
    let target_vals: Vec<usize> = matching.iter().map(|&(a, _)| pi.get(a)).collect();
    let ref_vals: Vec<usize> = matching.iter().map(|&(_, b)| reference.get(b)).collect();
    if argsort(&target_vals) != argsort(&ref_vals) {
        return Err(IndexError::OrderMismatch);
    }

    let m = matching.len();
    let shared_label = 0usize;
    let target_rho = if m == 0 || m == n { 1 } else { 2 };
    let ref_rho = if m == 0 || m == n_ref { 1 } else { 2 };

    let mut target_labels = vec![target_rho - 1; n];
    for &(a, _) in matching {
        target_labels[a] = shared_label;
    }
    let mut ref_labels = vec![ref_rho - 1; n_ref];
    for &(_, b) in matching {
        ref_labels[b] = shared_label;
    }

    let bundle = Arc::new(ReferenceBundle::new(
        reference.text_ref(),
        reference.order().clone(),
        &ref_labels,
        ref_rho,
    )?);

    let mut modes: Vec<SubPermMode> = Vec::new();
    if m > 0 {
        modes.push(SubPermMode::Reference {
            bundle: Arc::clone(&bundle),
            label: shared_label,
        });
    }
    if m < n {
        // With an empty matching this is the only (explicit) subsequence.
        modes.push(SubPermMode::Explicit);
    }

    let target = RelativePermutation::encode(pi.order(), &target_labels, &modes)?;
    Ok(RelativeDocumentSa {
        reference: bundle,
        target,
    })
}

fn argsort(values: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by_key(|&k| values[k]);
    idx
}

/// Finds a monotone, order-consistent matching between two permutations.
///
/// Candidate pairs join equal values (values past the shorter length are
/// unmatched) and, when lengths differ, values offset by the length
/// difference, which captures the position shift a single edit induces.
/// The longest subsequence of candidates increasing in both position
/// coordinates is taken, then thinned to its largest value-order-consistent
/// subset; the result is verified before returning. Finding the longest
/// usable subsequence exactly is NP-hard, so this is a heuristic and the
/// matching stays a replaceable input to [`compress_relative_document_sa`].
pub fn find_matching(pi: &Permutation, pihat: &Permutation) -> Vec<(usize, usize)> {
    let n = pi.len();
    let n_hat = pihat.len();
    if n == 0 || n_hat == 0 {
        return Vec::new();
    }
    let pos_pi = pi.inverse();
    let pos_hat = pihat.inverse();

    // (position in pi, position in pihat), possibly two candidates per value.
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for v in 0..n.min(n_hat) {
        candidates.push((pos_pi.get(v), pos_hat.get(v)));
    }
    if n != n_hat {
        let shift = n_hat as isize - n as isize;
        for v in 0..n {
            let w = v as isize + shift;
            if (0..n_hat as isize).contains(&w) {
                candidates.push((pos_pi.get(v), pos_hat.get(w as usize)));
            }
        }
    }
    candidates.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    candidates.dedup();

    // Strict LIS on the second coordinate; the sort order guarantees at most
    // one candidate per first coordinate survives.
    let second: Vec<usize> = candidates.iter().map(|&(_, b)| b).collect();
    let mut selected: Vec<(usize, usize)> = lis_indices(&second)
        .into_iter()
        .map(|k| candidates[k])
        .collect();

    // Thin to the largest subset whose values agree in relative order: sort
    // by pi-side value and keep an LIS of the reference-side values.
    selected.sort_unstable_by_key(|&(a, _)| pi.get(a));
    let hat_vals: Vec<usize> = selected.iter().map(|&(_, b)| pihat.get(b)).collect();
    let mut matching: Vec<(usize, usize)> = lis_indices(&hat_vals)
        .into_iter()
        .map(|k| selected[k])
        .collect();
    matching.sort_unstable();

    debug_assert!(matching.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    let a_vals: Vec<usize> = matching.iter().map(|&(a, _)| pi.get(a)).collect();
    let b_vals: Vec<usize> = matching.iter().map(|&(_, b)| pihat.get(b)).collect();
    debug_assert_eq!(argsort(&a_vals), argsort(&b_vals));
    matching
}

/// Indices of one longest strictly increasing subsequence (patience sorting
/// with predecessor pointers).
fn lis_indices(seq: &[usize]) -> Vec<usize> {
    if seq.is_empty() {
        return Vec::new();
    }
    let mut tails: Vec<usize> = Vec::new(); // indices into seq
    let mut prev: Vec<usize> = vec![usize::MAX; seq.len()];
    for (i, &x) in seq.iter().enumerate() {
        let t = tails.partition_point(|&k| seq[k] < x);
        if t > 0 {
            prev[i] = tails[t - 1];
        }
        if t == tails.len() {
            tails.push(i);
        } else {
            tails[t] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = *tails.last().unwrap();
    loop {
        out.push(cur);
        if prev[cur] == usize::MAX {
            break;
        }
        cur = prev[cur];
    }
    out.reverse();
    out
}

/// `min(sigma^w + w, sigma^(l-w) + l - w)`: the number of increasing
/// subsequences an SA-relative SSA encoding can need at most.
pub fn rho_bound(sigma: usize, weight: usize, length: usize) -> u128 {
    let term = |m: usize| -> u128 {
        (sigma as u128)
            .checked_pow(m as u32)
            .map_or(u128::MAX, |p| p.saturating_add(m as u128))
    };
    term(weight).min(term(length - weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suffix::build_ssa;
    use crate::text::parse_seed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn text(s: &[u8]) -> Text {
        Text::from_bytes(s, "test").unwrap()
    }

    fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8) -> Text {
        let bytes: Vec<u8> = (0..n).map(|_| b'a' + rng.random_range(0..sigma)).collect();
        text(&bytes)
    }

    #[test]
    fn compress_ssa_worked_example() {
        let t = text(b"abracadabra");
        let seed = parse_seed("101", None).unwrap();
        let sa = build_sa(&t);
        let ssa = build_ssa_with_sa(&t, &seed, &sa);
        let c = compress_ssa(&sa, &ssa).unwrap();
        assert_eq!(c.rho(), 2);
        let coll = {
            let mut coll = SeedCollection::new(sa, t.sigma());
            coll.insert("101", c).unwrap();
            coll
        };
        let expect = [10, 3, 5, 7, 0, 8, 1, 4, 6, 9, 2];
        for (i, &want) in expect.iter().enumerate() {
            assert_eq!(coll.access("101", i).unwrap(), want);
        }
        assert_eq!(coll.access("101", 3).unwrap(), 7);
        assert_eq!(coll.access("101", 0).unwrap(), 10);
    }

    #[test]
    fn all_match_seed_compresses_to_nothing() {
        let t = text(b"mississippi");
        let seed = parse_seed("11111", None).unwrap();
        let sa = build_sa(&t);
        let ssa = build_ssa_with_sa(&t, &seed, &sa);
        let c = compress_ssa(&sa, &ssa).unwrap();
        assert_eq!(c.rho(), 1);
        assert_eq!(c.size_report().payload_bits, 0);
    }

    #[test]
    fn compress_ssa_rejects_text_mismatch() {
        let t1 = Text::from_bytes(b"abracadabra", "one").unwrap();
        let t2 = Text::from_bytes(b"abracadabra", "two").unwrap();
        let seed = parse_seed("101", None).unwrap();
        let sa = build_sa(&t1);
        let ssa = build_ssa(&t2, &seed);
        assert!(matches!(
            compress_ssa(&sa, &ssa),
            Err(IndexError::TextMismatch { .. })
        ));
    }

    #[test]
    fn compressed_access_matches_ssa_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..200 {
            let n = rng.random_range(1..=128);
            let sigma = rng.random_range(1..=4);
            let t = random_text(&mut rng, n, sigma);
            let l = rng.random_range(1..=10usize);
            let spec: String = std::iter::once('1')
                .chain((1..l).map(|_| if rng.random_bool(0.5) { '1' } else { '0' }))
                .collect();
            let seed = parse_seed(&spec, None).unwrap();
            let sa = build_sa(&t);
            let ssa = build_ssa_with_sa(&t, &seed, &sa);
            let c = compress_ssa(&sa, &ssa).unwrap();
            let mut coll = SeedCollection::new(sa, t.sigma());
            coll.insert(spec.clone(), c).unwrap();
            for i in 0..t.len() {
                assert_eq!(coll.access(&spec, i).unwrap(), ssa.get(i));
            }
        }
    }

    #[test]
    fn chained_access_through_two_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..50 {
            let n = rng.random_range(8..=96);
            let t = random_text(&mut rng, n, 4);
            let sa = build_sa(&t);
            let seed_a = parse_seed("1101", None).unwrap();
            let seed_b = parse_seed("1011", None).unwrap();
            let ssa_a = build_ssa_with_sa(&t, &seed_a, &sa);
            let ssa_b = build_ssa_with_sa(&t, &seed_b, &sa);

            let mut coll = SeedCollection::new(sa.clone(), t.sigma());
            coll.insert("1101", compress_ssa(&sa, &ssa_a).unwrap())
                .unwrap();
            let rel_b = compress_relative(ssa_a.order(), ssa_b.order()).unwrap();
            coll.insert("1011", CompressedSsa::from_parts("1101", rel_b, "1011"))
                .unwrap();

            assert_eq!(coll.depth("1011").unwrap(), 2);
            for i in 0..t.len() {
                assert_eq!(coll.access("1011", i).unwrap(), ssa_b.get(i), "i={i}");
            }
        }
    }

    #[test]
    fn dangling_reference_is_reported() {
        let t = text(b"abcabc");
        let sa = build_sa(&t);
        let rel = compress_relative(sa.order(), sa.order()).unwrap();
        let mut coll = SeedCollection::new(sa, t.sigma());
        coll.insert("x", CompressedSsa::from_parts("missing", rel, "1"))
            .unwrap();
        assert!(matches!(
            coll.access("x", 0),
            Err(IndexError::DanglingReference { .. })
        ));
        assert!(matches!(
            coll.access("nope", 0),
            Err(IndexError::UnknownEntry { .. })
        ));
    }

    #[test]
    fn cost_estimate_examples() {
        let t = text(b"abracadabra");
        let sa = build_sa(&t);
        let seed = parse_seed("101", None).unwrap();
        let ssa = build_ssa_with_sa(&t, &seed, &sa);

        let same = estimate_pair_cost(sa.order(), sa.order()).unwrap();
        assert_eq!((same.rho, same.payload_bits), (1, 0));
        assert_eq!(same.total_bits(), 0);

        let c = estimate_pair_cost(sa.order(), ssa.order()).unwrap();
        assert_eq!(c.rho, 2);
        assert_eq!(c.payload_bits, 22);
    }

    #[test]
    fn cost_estimates_are_symmetric() {
        // rho is invariant under inversion, so both directions agree.
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..100 {
            let t = random_text(&mut rng, 64, 3);
            let sa = build_sa(&t);
            let seed = parse_seed("1001", None).unwrap();
            let ssa = build_ssa_with_sa(&t, &seed, &sa);
            let ab = estimate_pair_cost(sa.order(), ssa.order()).unwrap();
            let ba = estimate_pair_cost(ssa.order(), sa.order()).unwrap();
            assert_eq!(ab, ba);
        }
    }

    /// Exhaustive minimum arborescence for small node counts.
    fn brute_force_arborescence(costs: &CostMatrix) -> (u64, Vec<usize>) {
        let k = costs.num_entries();
        let mut best = (u64::MAX, Vec::new());
        let mut parents = vec![0usize; k];
        fn rec(
            v: usize,
            k: usize,
            costs: &CostMatrix,
            parents: &mut Vec<usize>,
            best: &mut (u64, Vec<usize>),
        ) {
            if v > k {
                // acyclic?
                for start in 1..=k {
                    let mut seen = 0;
                    let mut cur = start;
                    while cur != 0 {
                        cur = parents[cur - 1];
                        seen += 1;
                        if seen > k {
                            return;
                        }
                    }
                }
                let total: u64 = (1..=k).map(|v| costs.get(parents[v - 1], v)).sum();
                if total < best.0 {
                    *best = (total, parents.clone());
                }
                return;
            }
            for p in 0..=k {
                if p != v {
                    parents[v - 1] = p;
                    rec(v + 1, k, costs, parents, best);
                }
            }
        }
        rec(1, k, costs, &mut parents, &mut best);
        best
    }

    #[test]
    fn arborescence_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for _ in 0..300 {
            let k = rng.random_range(1..=4usize);
            let cost: Vec<Vec<u64>> = (0..=k)
                .map(|_| (0..k).map(|_| rng.random_range(1..100u64)).collect())
                .collect();
            let costs = CostMatrix::from_costs(cost).unwrap();
            let plan = plan_reference_tree(&costs, TreePolicy::MstDirected, k.max(1)).unwrap();
            let (best_cost, _) = brute_force_arborescence(&costs);
            assert_eq!(
                plan.total_cost_bits, best_cost,
                "k={k} parents={:?}",
                plan.parents
            );
            assert!(plan.total_cost_bits <= plan.star_cost_bits);
        }
    }

    #[test]
    fn star_when_direct_edges_cheapest() {
        // Rows: from SA, from entry 1, from entry 2; diagonal never picked.
        let costs =
            CostMatrix::from_costs(vec![vec![1, 2], vec![u64::MAX, 90], vec![90, u64::MAX]])
                .unwrap();
        let plan = plan_reference_tree(&costs, TreePolicy::MstDirected, 4).unwrap();
        assert_eq!(plan.parents, vec![0, 0]);
        assert_eq!(plan.total_cost_bits, 3);
        assert_eq!(plan.depths, vec![1, 1]);
    }

    #[test]
    fn chain_when_relative_edge_cheaper() {
        // SA->x costs 10, SA->y costs 50, x->y costs 5: best tree chains y
        // under x.
        let costs =
            CostMatrix::from_costs(vec![vec![10, 50], vec![u64::MAX, 5], vec![60, u64::MAX]])
                .unwrap();
        let plan = plan_reference_tree(&costs, TreePolicy::MstDirected, 4).unwrap();
        assert_eq!(plan.parents, vec![0, 1]);
        assert_eq!(plan.total_cost_bits, 15);
        assert_eq!(plan.depths, vec![1, 2]);
        // Depth cap 1 forces the star.
        let capped = plan_reference_tree(&costs, TreePolicy::MstDirected, 1).unwrap();
        assert_eq!(capped.parents, vec![0, 0]);
        assert_eq!(capped.total_cost_bits, 60);
    }

    #[test]
    fn single_entry_parents_to_sa() {
        let costs = CostMatrix::from_costs(vec![vec![7], vec![u64::MAX]]).unwrap();
        let plan = plan_reference_tree(&costs, TreePolicy::MstDirected, 4).unwrap();
        assert_eq!(plan.parents, vec![0]);
        assert_eq!(plan.depths, vec![1]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn undirected_prim_agrees_on_symmetric_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for _ in 0..100 {
            let k = rng.random_range(1..=4usize);
            // Symmetric matrix as the estimator produces.
            let mut cost = vec![vec![0u64; k]; k + 1];
            for u in 0..=k {
                for v in 1..=k {
                    if u == v {
                        cost[u][v - 1] = u64::MAX;
                    } else if u > v || u == 0 {
                        cost[u][v - 1] = rng.random_range(1..100);
                    }
                }
            }
            for u in 1..=k {
                for v in 1..=k {
                    if u < v {
                        cost[u][v - 1] = cost[v][u - 1];
                    }
                }
            }
            let costs = CostMatrix::from_costs(cost).unwrap();
            let directed = plan_reference_tree(&costs, TreePolicy::MstDirected, k.max(1)).unwrap();
            let undirected =
                plan_reference_tree(&costs, TreePolicy::MstUndirected, k.max(1)).unwrap();
            assert_eq!(directed.total_cost_bits, undirected.total_cost_bits);
        }
    }

    #[test]
    fn find_matching_identity() {
        let p = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        let m = find_matching(&p, &p);
        assert_eq!(m.len(), 4);
        assert!(m.iter().all(|&(a, b)| a == b));
    }

    #[test]
    fn find_matching_reversed_vs_identity() {
        let n = 9;
        let rev = Permutation::new((0..n).rev().collect()).unwrap();
        let id = Permutation::identity(n);
        assert_eq!(find_matching(&rev, &id).len(), 1);
    }

    #[test]
    fn document_pair_matching_beats_paper_bar() {
        // SAs of the edited document pair; the hand matching in the source
        // material leaves 5 explicit entries.
        let pi = Permutation::new(vec![12, 11, 6, 3, 8, 0, 5, 7, 4, 9, 1, 10, 2]).unwrap();
        let pihat = Permutation::new(vec![11, 10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2]).unwrap();
        let m = find_matching(&pi, &pihat);
        assert!(m.len() >= 8, "matching too short: {m:?}");
        assert!(pi.len() - m.len() <= 5);
    }

    #[test]
    fn document_sa_worked_example_bit_exact() {
        let t_new = text(b"abrabbababra$");
        let t_old = Text::from_bytes(b"abracadabra$", "old").unwrap();
        let pi = build_sa(&t_new);
        let pihat = build_sa(&t_old);
        // The worked example's shared subsequence, as position pairs.
        let matching: Vec<(usize, usize)> = vec![
            (0, 0),
            (1, 1),
            (4, 2),
            (5, 3),
            (9, 6),
            (10, 7),
            (11, 10),
            (12, 11),
        ];
        let doc = compress_relative_document_sa(&pi, &pihat, &matching).unwrap();
        assert_eq!(doc.explicit_entries(), 5);
        assert_eq!(
            doc.target().subperm(1).explicit_values().unwrap(),
            vec![3, 0, 2, 4, 1]
        );
        let labels = |s: &crate::succinct::LabeledSequence| -> String {
            s.to_labels().iter().map(|l| l.to_string()).collect()
        };
        assert_eq!(labels(doc.target().by_position()), "0011001110000");
        assert_eq!(labels(doc.target().by_value()), "0001111100000");
        assert_eq!(labels(doc.reference().by_position()), "000011001100");
        assert_eq!(labels(doc.reference().by_value()), "000111100000");
        for i in 0..pi.len() {
            assert_eq!(doc.access(i).unwrap(), pi.get(i), "access({i})");
        }
    }

    #[test]
    fn document_sa_identical_documents() {
        let t = text(b"the quick brown fox$");
        let sa = build_sa(&t);
        let matching = find_matching(sa.order(), sa.order());
        assert_eq!(matching.len(), t.len());
        let doc = compress_relative_document_sa(&sa, &sa, &matching).unwrap();
        assert_eq!(doc.explicit_entries(), 0);
        for i in 0..t.len() {
            assert_eq!(doc.access(i).unwrap(), sa.get(i));
        }
    }

    #[test]
    fn document_sa_random_edits_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for round in 0..60 {
            let n = rng.random_range(16..=96);
            let mut bytes: Vec<u8> =
                (0..n).map(|_| b'a' + rng.random_range(0..3u8)).collect();
            let original = Text::from_bytes(&bytes, "orig").unwrap();
            // One substitution, insertion, or deletion.
            match round % 3 {
                0 => {
                    let k = rng.random_range(0..bytes.len());
                    bytes[k] = b'a' + rng.random_range(0..3u8);
                }
                1 => {
                    let k = rng.random_range(0..=bytes.len());
                    bytes.insert(k, b'a' + rng.random_range(0..3u8));
                }
                _ => {
                    let k = rng.random_range(0..bytes.len());
                    bytes.remove(k);
                }
            }
            let edited = Text::from_bytes(&bytes, "edit").unwrap();
            let sa_old = build_sa(&original);
            let sa_new = build_sa(&edited);
            let matching = find_matching(sa_new.order(), sa_old.order());
            let doc = compress_relative_document_sa(&sa_new, &sa_old, &matching).unwrap();
            for i in 0..sa_new.len() {
                assert_eq!(doc.access(i).unwrap(), sa_new.get(i), "round {round} i={i}");
            }
        }
    }

    #[test]
    fn document_sa_matching_validation() {
        let t = text(b"abcd");
        let sa = build_sa(&t);
        assert!(matches!(
            compress_relative_document_sa(&sa, &sa, &[(1, 1), (1, 2)]),
            Err(IndexError::NonMonotoneMatching(1))
        ));
        assert!(matches!(
            compress_relative_document_sa(&sa, &sa, &[(0, 9)]),
            Err(IndexError::NonMonotoneMatching(0))
        ));
        // Positions 0 and 1 of the SA of "abcd" hold values 0 and 1; pairing
        // them crosswise flips the relative order.
        let other = build_sa(&text(b"dcba"));
        let bad = compress_relative_document_sa(&sa, &other, &[(0, 0), (1, 1)]);
        assert!(matches!(bad, Err(IndexError::OrderMismatch)));
    }

    #[test]
    fn rho_bound_values() {
        assert_eq!(rho_bound(2, 1, 12), 3); // min(2+1, 2^11+11)
        assert_eq!(rho_bound(4, 2, 4), 18); // both sides equal
        assert_eq!(rho_bound(5, 18, 20), 27); // sigma^2 + 2
    }

    #[test]
    fn rho_and_payload_bounds_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..300 {
            let sigma = if rng.random_bool(0.5) { 2u8 } else { 4 };
            let n = rng.random_range(1..=128);
            let t = random_text(&mut rng, n, sigma);
            let l = rng.random_range(1..=10usize);
            let spec: String = std::iter::once('1')
                .chain((1..l).map(|_| if rng.random_bool(0.5) { '1' } else { '0' }))
                .collect();
            let seed = parse_seed(&spec, None).unwrap();
            let sa = build_sa(&t);
            let ssa = build_ssa_with_sa(&t, &seed, &sa);
            let c = compress_ssa(&sa, &ssa).unwrap();
            let bound = rho_bound(t.sigma() as usize, seed.weight(), seed.length());
            assert!(
                (c.rho() as u128) <= bound,
                "rho {} over bound {bound} for seed {spec}",
                c.rho()
            );
            // Payload stays within two label sequences at the bound's bit
            // width (the rounding-safe reading of the space bound).
            let max_levels = bits_for(bound.min(usize::MAX as u128) as usize);
            assert!(c.size_report().payload_bits <= 2 * t.len() * max_levels);
        }
    }
}
