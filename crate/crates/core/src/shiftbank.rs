//! The integer-label model of the register bank and its graph.
//!
//! A label array is a triangular matrix u with columns u_0..u_ell,
//! column j holding labels u[j][k] for k = j..=ell, each in
//! 0..sizes[k]. Arrays are the edges of the bank graph; a node is the
//! last ell columns. One time step shifts every column right and drops
//! its bottom entry, so edge (u_0,..,u_ell) runs from tail
//! (u_1,..,u_ell) to head (shift u_0, .., shift u_{ell-1}).
//!
//! Automorphisms of this graph decompose into permutation families
//! beta[j][k] acting on single labels. The family at a cell below the
//! diagonal is forced by the one a step up and right (the entry reaches
//! the diagonal after k-j more shifts, by which time the rest of the
//! bank has shifted alongside it), so an automorphism is exactly a free
//! choice of diagonal families: for each row k, one permutation of
//! 0..sizes[k] per future bank state (u_{k+1},..,u_ell). That makes the
//! group order the product over k of (sizes[k]!)^Upsilon_k with
//! Upsilon_k the number of such states.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::group::all_permutations;
use crate::schreier::QuotientCells;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShiftbankError {
    #[error("graph would have {size} {what}, over the cap {cap}")]
    TooLarge {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error("automorphism count {count} exceeds the enumeration cap {cap}")]
    TooMany { count: BigUint, cap: u64 },
}

/// Row sizes of the label bank; sizes[k] = |U_{j,k}| for every j in the
/// row (the quotients along a row share one order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UBank {
    ell: usize,
    sizes: Vec<usize>,
}

impl UBank {
    pub fn new(sizes: Vec<usize>) -> Self {
        assert!(!sizes.is_empty() && sizes.iter().all(|&s| s >= 1));
        UBank {
            ell: sizes.len() - 1,
            sizes,
        }
    }

    pub fn from_cells(cells: &QuotientCells) -> Self {
        let sizes = (0..=cells.ell()).map(|k| cells.q(0, k).order()).collect();
        UBank::new(sizes)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn size(&self, k: usize) -> usize {
        self.sizes[k]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    fn edge_count(&self) -> u64 {
        (0..=self.ell)
            .map(|k| (self.sizes[k] as u64).pow(k as u32 + 1))
            .product()
    }

    fn node_count(&self) -> u64 {
        (0..=self.ell)
            .map(|k| (self.sizes[k] as u64).pow(k as u32))
            .product()
    }

    /// All label columns for position j: tuples over rows j..=ell.
    fn columns_at(&self, j: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for k in j..=self.ell {
            let mut next = Vec::with_capacity(out.len() * self.sizes[k]);
            for col in &out {
                for u in 0..self.sizes[k] {
                    let mut c = col.clone();
                    c.push(u);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }
}

/// A full triangular label array (an edge of the bank graph).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UMatrix {
    ell: usize,
    cols: Vec<Vec<usize>>,
}

impl UMatrix {
    pub fn zero(ell: usize) -> Self {
        UMatrix {
            ell,
            cols: (0..=ell).map(|j| vec![0; ell - j + 1]).collect(),
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, j: usize, k: usize) -> usize {
        self.cols[j][k - j]
    }

    pub fn set(&mut self, j: usize, k: usize, u: usize) {
        self.cols[j][k - j] = u;
    }

    /// Column j as (u_{j,j}, .., u_{j,ell}), bottom entry first.
    pub fn column(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    /// The node the edge leaves: columns 1..=ell.
    pub fn tail(&self) -> NodeState {
        NodeState {
            ell: self.ell,
            cols: self.cols[1..].to_vec(),
        }
    }

    /// The node the edge enters: columns 0..ell shifted, each losing
    /// its bottom entry.
    pub fn head(&self) -> NodeState {
        NodeState {
            ell: self.ell,
            cols: (0..self.ell).map(|j| self.cols[j][1..].to_vec()).collect(),
        }
    }

    /// The masked memory index of cell (j, k): columns j..=j+(ell-k)
    /// with entries at rows <= k zeroed, flattened in a fixed layout.
    /// The source column j is included (its rows above k) because a
    /// basis-change map is only guaranteed to be a plain graph
    /// automorphism, whose column-j image may mix the rows of column j;
    /// the entry (j, k) itself is always masked out.
    pub fn memory_key(&self, j: usize, k: usize) -> Vec<usize> {
        let mut key = Vec::new();
        for c in j..=(j + self.ell - k) {
            for row in c..=self.ell {
                key.push(if row > k { self.get(c, row) } else { 0 });
            }
        }
        key
    }
}

/// A bank-graph node: columns 1..=ell of a label array.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeState {
    ell: usize,
    cols: Vec<Vec<usize>>,
}

impl NodeState {
    pub fn zero(ell: usize) -> Self {
        NodeState {
            ell,
            cols: (1..=ell).map(|j| vec![0; ell - j + 1]).collect(),
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Entry at column j (1..=ell), row k (j..=ell).
    pub fn get(&self, j: usize, k: usize) -> usize {
        self.cols[j - 1][k - j]
    }

    pub fn set(&mut self, j: usize, k: usize, u: usize) {
        self.cols[j - 1][k - j] = u;
    }

    /// The successor node when the fresh column `col0` (labels for rows
    /// 0..=ell) enters the bank.
    pub fn advance(&self, col0: &[usize]) -> NodeState {
        let ell = self.ell;
        let mut cols = Vec::with_capacity(ell);
        if ell > 0 {
            cols.push(col0[1..].to_vec());
            for j in 1..ell {
                cols.push(self.cols[j - 1][1..].to_vec());
            }
        }
        NodeState { ell, cols }
    }
}

/// The materialized graph: all nodes, all edges, and the endpoint map.
pub struct BankGraph {
    pub bank: UBank,
    pub nodes: Vec<NodeState>,
    pub edges: Vec<UMatrix>,
    /// endpoints[e] = (tail node index, head node index).
    pub endpoints: Vec<(usize, usize)>,
    node_index: BTreeMap<NodeState, usize>,
}

impl BankGraph {
    pub fn node_index(&self, n: &NodeState) -> usize {
        self.node_index[n]
    }

    pub fn edge_index(&self, e: &UMatrix) -> usize {
        self.edges.binary_search(e).expect("edge exists")
    }
}

pub const DEFAULT_EDGE_CAP: u64 = 100_000;

pub fn build_graph(bank: &UBank, edge_cap: u64) -> Result<BankGraph, ShiftbankError> {
    let ec = bank.edge_count();
    if ec > edge_cap {
        return Err(ShiftbankError::TooLarge {
            what: "edges",
            size: ec,
            cap: edge_cap,
        });
    }
    let ell = bank.ell();
    let mut edges = vec![UMatrix::zero(ell)];
    for j in 0..=ell {
        for k in j..=ell {
            let mut next = Vec::with_capacity(edges.len() * bank.size(k));
            for e in &edges {
                for u in 0..bank.size(k) {
                    let mut e2 = e.clone();
                    e2.set(j, k, u);
                    next.push(e2);
                }
            }
            edges = next;
        }
    }
    edges.sort();
    let mut node_index: BTreeMap<NodeState, usize> = BTreeMap::new();
    let mut nodes = Vec::new();
    for e in &edges {
        for n in [e.tail(), e.head()] {
            if !node_index.contains_key(&n) {
                node_index.insert(n.clone(), usize::MAX);
                nodes.push(n);
            }
        }
    }
    nodes.sort();
    for (i, n) in nodes.iter().enumerate() {
        *node_index.get_mut(n).unwrap() = i;
    }
    let endpoints = edges
        .iter()
        .map(|e| (node_index[&e.tail()], node_index[&e.head()]))
        .collect();
    debug_assert_eq!(nodes.len() as u64, bank.node_count());
    Ok(BankGraph {
        bank: bank.clone(),
        nodes,
        edges,
        endpoints,
        node_index,
    })
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64)
        .map(BigUint::from)
        .product::<BigUint>()
        .max(BigUint::from(1u8))
}

/// Number of future bank states indexing the free diagonal family of
/// row k: the count of column tuples (u_{k+1}, .., u_ell).
fn upsilon(bank: &UBank, k: usize) -> BigUint {
    let mut out = BigUint::from(1u8);
    for c in (k + 1)..=bank.ell() {
        for row in c..=bank.ell() {
            out *= BigUint::from(bank.size(row) as u64);
        }
    }
    out
}

/// |Aut| of the bank graph under the shift structure: the product over
/// rows of (sizes[k]!)^Upsilon_k.
pub fn count_automorphisms(bank: &UBank) -> BigUint {
    let mut out = BigUint::from(1u8);
    for k in 0..=bank.ell() {
        let ups: u32 = u32::try_from(upsilon(bank, k))
            .expect("free-family index count exceeds representable exponent");
        out *= factorial(bank.size(k)).pow(ups);
    }
    out
}

/// An automorphism in separated form: for each row k, one permutation
/// of 0..sizes[k] per future bank state. Everything else (the action on
/// edges, nodes, and every off-diagonal family) derives from these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BankAutomorphism {
    ell: usize,
    sizes: Vec<usize>,
    /// diag[k]: future-state key -> image array over 0..sizes[k].
    diag: Vec<BTreeMap<Vec<usize>, Vec<usize>>>,
}

/// The future-state key governing cell (j, k): the bank state after
/// k-j more shifts, read off the current columns. Future position i
/// (k+1..=ell) holds what is now column i-(k-j), truncated to rows
/// i..=ell.
fn future_key(ell: usize, j: usize, k: usize, get: &dyn Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut key = Vec::new();
    for i in (k + 1)..=ell {
        let c = i - (k - j);
        for row in i..=ell {
            key.push(get(c, row));
        }
    }
    key
}

impl BankAutomorphism {
    pub fn identity(bank: &UBank) -> Self {
        let mut diag = Vec::with_capacity(bank.ell() + 1);
        for k in 0..=bank.ell() {
            let mut fams = BTreeMap::new();
            for key in diagonal_keys(bank, k) {
                fams.insert(key, (0..bank.size(k)).collect());
            }
            diag.push(fams);
        }
        BankAutomorphism {
            ell: bank.ell(),
            sizes: bank.sizes().to_vec(),
            diag,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.diag.iter().all(|fams| {
            fams.values()
                .all(|p| p.iter().enumerate().all(|(i, &v)| i == v))
        })
    }

    /// The permutation applied to the label at (j, k) in the context of
    /// an edge.
    pub fn beta_for_edge<'a>(&'a self, j: usize, k: usize, edge: &UMatrix) -> &'a [usize] {
        let key = future_key(self.ell, j, k, &|c, row| edge.get(c, row));
        &self.diag[k][&key]
    }

    pub fn apply_edge(&self, edge: &UMatrix) -> UMatrix {
        let mut out = edge.clone();
        for j in 0..=self.ell {
            for k in j..=self.ell {
                out.set(j, k, self.beta_for_edge(j, k, edge)[edge.get(j, k)]);
            }
        }
        out
    }

    pub fn apply_node(&self, node: &NodeState) -> NodeState {
        let mut out = node.clone();
        for j in 1..=self.ell {
            for k in j..=self.ell {
                let key = future_key(self.ell, j, k, &|c, row| node.get(c, row));
                out.set(j, k, self.diag[k][&key][node.get(j, k)]);
            }
        }
        out
    }

    /// The edge map as a permutation of graph edge indices.
    pub fn edge_permutation(&self, graph: &BankGraph) -> Vec<usize> {
        graph
            .edges
            .iter()
            .map(|e| graph.edge_index(&self.apply_edge(e)))
            .collect()
    }
}

fn diagonal_keys(bank: &UBank, k: usize) -> Vec<Vec<usize>> {
    // Cartesian product of the full columns k+1..=ell, flattened the
    // same way future_key flattens them for j = k.
    let mut keys = vec![Vec::new()];
    for c in (k + 1)..=bank.ell() {
        let cols = bank.columns_at(c);
        let mut next = Vec::with_capacity(keys.len() * cols.len());
        for key in &keys {
            for col in &cols {
                let mut k2 = key.clone();
                k2.extend_from_slice(col);
                next.push(k2);
            }
        }
        keys = next;
    }
    keys
}

pub const DEFAULT_ENUM_CAP: u64 = 10_000;

/// Every automorphism, as the cartesian product of permutation choices
/// over the free diagonal slots, in a canonical order (slots by (k,
/// key), permutations lexicographic).
pub fn enumerate_automorphisms(
    bank: &UBank,
    cap: u64,
) -> Result<Vec<BankAutomorphism>, ShiftbankError> {
    let count = count_automorphisms(bank);
    if count > BigUint::from(cap) {
        return Err(ShiftbankError::TooMany { count, cap });
    }
    let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
    for k in 0..=bank.ell() {
        for key in diagonal_keys(bank, k) {
            slots.push((k, key));
        }
    }
    let perms_by_row: Vec<Vec<Vec<usize>>> = (0..=bank.ell())
        .map(|k| all_permutations(bank.size(k)))
        .collect();
    let mut out = vec![BankAutomorphism::identity(bank)];
    for (k, key) in &slots {
        let mut next = Vec::with_capacity(out.len() * perms_by_row[*k].len());
        for aut in &out {
            for perm in &perms_by_row[*k] {
                let mut a2 = aut.clone();
                a2.diag[*k].insert(key.clone(), perm.clone());
                next.push(a2);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Checks the endpoint condition for a candidate edge bijection: infer
/// the node map from endpoints and demand it is a consistent bijection.
pub fn is_graph_automorphism(graph: &BankGraph, edge_map: &[usize]) -> bool {
    let n = graph.nodes.len();
    if edge_map.len() != graph.edges.len() {
        return false;
    }
    let mut seen = vec![false; edge_map.len()];
    for &img in edge_map {
        if img >= edge_map.len() || seen[img] {
            return false;
        }
        seen[img] = true;
    }
    let mut node_map = vec![usize::MAX; n];
    for (e, &img) in edge_map.iter().enumerate() {
        let (a, b) = graph.endpoints[e];
        let (a2, b2) = graph.endpoints[img];
        for (src, dst) in [(a, a2), (b, b2)] {
            if node_map[src] == usize::MAX {
                node_map[src] = dst;
            } else if node_map[src] != dst {
                return false;
            }
        }
    }
    let mut hit = vec![false; n];
    for &m in &node_map {
        if m == usize::MAX || hit[m] {
            return false;
        }
        hit[m] = true;
    }
    true
}

pub const BRUTE_NODE_CAP: usize = 12;
pub const BRUTE_EDGE_CAP: usize = 64;

/// Independent oracle: the plain directed-multigraph automorphism
/// count, by backtracking over node permutations; each valid node map
/// contributes the product of factorials of the parallel-edge
/// multiplicities.
pub fn brute_force_graph_automorphisms(graph: &BankGraph) -> Result<BigUint, ShiftbankError> {
    let n = graph.nodes.len();
    let e = graph.edges.len();
    if n > BRUTE_NODE_CAP {
        return Err(ShiftbankError::TooLarge {
            what: "nodes",
            size: n as u64,
            cap: BRUTE_NODE_CAP as u64,
        });
    }
    if e > BRUTE_EDGE_CAP {
        return Err(ShiftbankError::TooLarge {
            what: "edges",
            size: e as u64,
            cap: BRUTE_EDGE_CAP as u64,
        });
    }
    let mut mult = vec![vec![0usize; n]; n];
    for &(a, b) in &graph.endpoints {
        mult[a][b] += 1;
    }
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let valid = count_node_maps(&mult, 0, &mut perm, &mut used);
    let matchings: BigUint = mult
        .iter()
        .flat_map(|row| row.iter())
        .map(|&m| factorial(m))
        .product();
    Ok(BigUint::from(valid) * matchings)
}

fn count_node_maps(mult: &[Vec<usize>], at: usize, perm: &mut [usize], used: &mut [bool]) -> u64 {
    let n = mult.len();
    if at == n {
        return 1;
    }
    let mut total = 0;
    'cand: for c in 0..n {
        if used[c] {
            continue;
        }
        // Degrees and loops must match the already-placed prefix.
        if mult[at][at] != mult[c][c] {
            continue;
        }
        for prev in 0..at {
            let p = perm[prev];
            if mult[at][prev] != mult[c][p] || mult[prev][at] != mult[p][c] {
                continue 'cand;
            }
        }
        perm[at] = c;
        used[c] = true;
        total += count_node_maps(mult, at + 1, perm, used);
        perm[at] = usize::MAX;
        used[c] = false;
    }
    total
}

/// The separating families: for each row k, the permutation attached to
/// every masked index (columns 1..=ell-k, entries at rows <= k zeroed).
/// These pin the whole automorphism down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingPermutations {
    ell: usize,
    pub families: Vec<BTreeMap<Vec<usize>, Vec<usize>>>,
}

fn separating_keys(bank: &UBank, k: usize) -> Vec<Vec<usize>> {
    // Free entries are the rows above k; masked rows are fixed zeros.
    let ell = bank.ell();
    let mut keys = vec![Vec::new()];
    for c in 1..=(ell - k) {
        for row in c..=ell {
            if row > k {
                let mut next = Vec::with_capacity(keys.len() * bank.size(row));
                for key in &keys {
                    for u in 0..bank.size(row) {
                        let mut k2 = key.clone();
                        k2.push(u);
                        next.push(k2);
                    }
                }
                keys = next;
            } else {
                for key in &mut keys {
                    key.push(0);
                }
            }
        }
    }
    keys
}

/// Reads a separating key as a partial edge: entry (c, row) of the
/// masked columns 1..=ell-k.
fn separating_entry(ell: usize, k: usize, key: &[usize], c: usize, row: usize) -> usize {
    let mut pos = 0;
    for cc in 1..=(ell - k) {
        for rr in cc..=ell {
            if cc == c && rr == row {
                return key[pos];
            }
            pos += 1;
        }
    }
    unreachable!("entry ({c}, {row}) lies inside the masked index");
}

pub fn separating_permutations(bank: &UBank, aut: &BankAutomorphism) -> SeparatingPermutations {
    let ell = bank.ell();
    let mut families = Vec::with_capacity(ell + 1);
    for k in 0..=ell {
        let mut fams = BTreeMap::new();
        for key in separating_keys(bank, k) {
            let fut = future_key(ell, 0, k, &|c, row| separating_entry(ell, k, &key, c, row));
            fams.insert(key, aut.diag[k][&fut].clone());
        }
        families.push(fams);
    }
    SeparatingPermutations { ell, families }
}

/// Rebuilds the diagonal families from the separating ones: the future
/// state (u_{k+1},..,u_ell) embeds into the canonical masked index with
/// column c carrying the future column c+k and zeros elsewhere.
pub fn reconstruct_from_separating(bank: &UBank, sep: &SeparatingPermutations) -> BankAutomorphism {
    let ell = bank.ell();
    let mut aut = BankAutomorphism::identity(bank);
    for k in 0..=ell {
        let keys: Vec<Vec<usize>> = aut.diag[k].keys().cloned().collect();
        for fut in keys {
            // fut holds, for i = k+1..=ell, the rows i..=ell of the
            // future column i.
            let mut sep_key = Vec::new();
            let mut offsets = BTreeMap::new();
            let mut pos = 0;
            for i in (k + 1)..=ell {
                for row in i..=ell {
                    offsets.insert((i, row), pos);
                    pos += 1;
                }
            }
            for c in 1..=(ell - k) {
                for row in c..=ell {
                    let i = c + k;
                    let v = if row >= i { fut[offsets[&(i, row)]] } else { 0 };
                    sep_key.push(v);
                }
            }
            let perm = sep.families[k][&sep_key].clone();
            aut.diag[k].insert(fut, perm);
        }
    }
    aut
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schreier::{controllable_matrix, quotient_cells};
    use crate::trellis::compute_chains;

    fn bank_of(sec: &crate::trellis::TrellisSection) -> UBank {
        let chains = compute_chains(sec).unwrap();
        let m = controllable_matrix(sec, &chains).unwrap();
        UBank::from_cells(&quotient_cells(sec, &m).unwrap())
    }

    fn two_two() -> UBank {
        UBank::new(vec![2, 2])
    }

    #[test]
    fn bank_sizes_from_fixtures() {
        assert_eq!(bank_of(&fixtures::fix_a()).sizes(), &[2, 1]);
        assert_eq!(bank_of(&fixtures::fix_b()).sizes(), &[1, 2]);
        assert_eq!(bank_of(&fixtures::fix_c()).sizes(), &[1, 1, 2]);
        assert_eq!(bank_of(&fixtures::fix_e()).sizes(), &[2, 2]);
    }

    #[test]
    fn graph_shapes() {
        let g = build_graph(&bank_of(&fixtures::fix_b()), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!((g.nodes.len(), g.edges.len()), (2, 4));
        for (i, e) in g.edges.iter().enumerate() {
            assert_eq!(
                g.endpoints[i],
                (g.node_index(&e.tail()), g.node_index(&e.head()))
            );
        }
        // Complete digraph with loops: every ordered pair once.
        let mut pairs: Vec<(usize, usize)> = g.endpoints.clone();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);

        let g = build_graph(&UBank::new(vec![1, 1]), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!((g.nodes.len(), g.edges.len()), (1, 1));
        assert_eq!(g.endpoints, vec![(0, 0)]);

        let g = build_graph(&bank_of(&fixtures::fix_c()), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!((g.nodes.len(), g.edges.len()), (4, 8));

        assert!(matches!(
            build_graph(&UBank::new(vec![100, 100]), 100),
            Err(ShiftbankError::TooLarge { .. })
        ));
    }

    #[test]
    fn counts_match_formula() {
        assert_eq!(
            count_automorphisms(&bank_of(&fixtures::fix_b())),
            BigUint::from(2u8)
        );
        assert_eq!(
            count_automorphisms(&UBank::new(vec![1, 1, 1])),
            BigUint::from(1u8)
        );
        assert_eq!(count_automorphisms(&two_two()), BigUint::from(8u8));
        assert_eq!(
            count_automorphisms(&bank_of(&fixtures::fix_c())),
            BigUint::from(2u8)
        );
    }

    #[test]
    fn enumeration_matches_count_and_is_sound() {
        for bank in [
            bank_of(&fixtures::fix_b()),
            bank_of(&fixtures::fix_c()),
            two_two(),
            UBank::new(vec![1, 1]),
        ] {
            let auts = enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap();
            assert_eq!(BigUint::from(auts.len() as u64), count_automorphisms(&bank));
            let graph = build_graph(&bank, DEFAULT_EDGE_CAP).unwrap();
            for aut in &auts {
                let map = aut.edge_permutation(&graph);
                assert!(is_graph_automorphism(&graph, &map));
            }
        }
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_automorphisms(&two_two(), 4),
            Err(ShiftbankError::TooMany { .. })
        ));
    }

    #[test]
    fn fix_b_nontrivial_automorphism_swaps_the_stream() {
        let bank = bank_of(&fixtures::fix_b());
        let auts = enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(auts.len(), 2);
        let nontrivial = auts.iter().find(|a| !a.is_identity()).unwrap();
        let mut e = UMatrix::zero(1);
        e.set(0, 1, 1);
        e.set(1, 1, 0);
        let img = nontrivial.apply_edge(&e);
        assert_eq!(img.get(0, 1), 0);
        assert_eq!(img.get(1, 1), 1);
        assert_eq!(img.get(0, 0), 0);
    }

    #[test]
    fn endpoint_condition_rejects_bad_swap() {
        // Swap two edges sharing a tail but not a head, fix the rest.
        let graph = build_graph(&bank_of(&fixtures::fix_b()), DEFAULT_EDGE_CAP).unwrap();
        let (mut e1, mut e2) = (None, None);
        for (i, &(a, b)) in graph.endpoints.iter().enumerate() {
            if a == 0 && b == 0 {
                e1 = Some(i);
            }
            if a == 0 && b == 1 {
                e2 = Some(i);
            }
        }
        let (e1, e2) = (e1.unwrap(), e2.unwrap());
        let mut map: Vec<usize> = (0..graph.edges.len()).collect();
        map.swap(e1, e2);
        assert!(!is_graph_automorphism(&graph, &map));
        let id: Vec<usize> = (0..graph.edges.len()).collect();
        assert!(is_graph_automorphism(&graph, &id));
    }

    #[test]
    fn brute_force_counts() {
        let g = build_graph(&bank_of(&fixtures::fix_b()), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(
            brute_force_graph_automorphisms(&g).unwrap(),
            BigUint::from(2u8)
        );
        let g = build_graph(&UBank::new(vec![1]), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(
            brute_force_graph_automorphisms(&g).unwrap(),
            BigUint::from(1u8)
        );
        let g = build_graph(&two_two(), DEFAULT_EDGE_CAP).unwrap();
        // 2 node maps x 2 parallel edges in each of 4 ordered pairs.
        assert_eq!(
            brute_force_graph_automorphisms(&g).unwrap(),
            BigUint::from(32u8)
        );
        let g = build_graph(&bank_of(&fixtures::fix_c()), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(
            brute_force_graph_automorphisms(&g).unwrap(),
            BigUint::from(2u8)
        );
    }

    #[test]
    fn formula_at_most_brute_force() {
        for bank in [
            bank_of(&fixtures::fix_a()),
            bank_of(&fixtures::fix_b()),
            bank_of(&fixtures::fix_c()),
            two_two(),
        ] {
            let g = build_graph(&bank, DEFAULT_EDGE_CAP).unwrap();
            let brute = brute_force_graph_automorphisms(&g).unwrap();
            assert!(count_automorphisms(&bank) <= brute);
        }
    }

    #[test]
    fn closure_under_composition_and_inverse() {
        let bank = two_two();
        let graph = build_graph(&bank, DEFAULT_EDGE_CAP).unwrap();
        let auts = enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap();
        let tables: Vec<Vec<usize>> = auts.iter().map(|a| a.edge_permutation(&graph)).collect();
        let member = |p: &Vec<usize>| tables.contains(p);
        for p in &tables {
            for q in &tables {
                // Apply q, then p.
                let comp: Vec<usize> = (0..p.len()).map(|i| p[q[i]]).collect();
                assert!(member(&comp));
            }
            let mut inv = vec![0; p.len()];
            for (i, &v) in p.iter().enumerate() {
                inv[v] = i;
            }
            assert!(member(&inv));
        }
    }

    #[test]
    fn separating_round_trip() {
        for bank in [
            two_two(),
            bank_of(&fixtures::fix_b()),
            bank_of(&fixtures::fix_c()),
        ] {
            for aut in enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap() {
                let sep = separating_permutations(&bank, &aut);
                let back = reconstruct_from_separating(&bank, &sep);
                assert_eq!(aut, back);
            }
        }
    }

    #[test]
    fn separating_family_of_the_swap() {
        let bank = bank_of(&fixtures::fix_b());
        let auts = enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap();
        let id = auts.iter().find(|a| a.is_identity()).unwrap();
        let sep = separating_permutations(&bank, id);
        assert!(sep
            .families
            .iter()
            .all(|f| f.values().all(|p| p == &vec![0] || p == &vec![0, 1])));
        let swap = auts.iter().find(|a| !a.is_identity()).unwrap();
        let sep = separating_permutations(&bank, swap);
        assert!(sep.families[1].values().any(|p| p == &vec![1, 0]));
    }

    #[test]
    fn column_maps_ignore_columns_to_the_left() {
        // Perturbing column 0 of an edge must not move the images of
        // columns 1 and up.
        let bank = two_two();
        for aut in enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap() {
            let mut e = UMatrix::zero(1);
            e.set(0, 0, 1);
            e.set(0, 1, 1);
            e.set(1, 1, 1);
            let mut e2 = e.clone();
            e2.set(0, 0, 0);
            e2.set(0, 1, 0);
            let (i1, i2) = (aut.apply_edge(&e), aut.apply_edge(&e2));
            assert_eq!(i1.get(1, 1), i2.get(1, 1));
        }
    }

    #[test]
    fn column_insensitivity_exhaustive_at_depth_two() {
        // Over every enumerated automorphism of a depth-2 bank and
        // every edge pair agreeing on columns >= j, the image columns
        // >= j agree too.
        let bank = UBank::new(vec![1, 2, 2]);
        let graph = build_graph(&bank, DEFAULT_EDGE_CAP).unwrap();
        for aut in enumerate_automorphisms(&bank, DEFAULT_ENUM_CAP).unwrap() {
            for e in &graph.edges {
                for e2 in &graph.edges {
                    for j in 0..=2usize {
                        let agree_right = (j..=2).all(|c| e.column(c) == e2.column(c));
                        if !agree_right {
                            continue;
                        }
                        let (i1, i2) = (aut.apply_edge(e), aut.apply_edge(e2));
                        for c in j..=2 {
                            assert_eq!(i1.column(c), i2.column(c));
                        }
                    }
                }
            }
        }
    }
}
