//! Group trellis sections: a branch group B inside Sigma x A x Sigma,
//! its splitting and merging kernels, the chains they generate under
//! the next/previous branch maps, the controllability index, and
//! finite-window path enumeration.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::group::{is_normal, FiniteGroup, GroupError, Subgroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrellisError {
    #[error("branch triple {index} references an element outside its group")]
    InvalidTriple { index: usize },
    #[error("branch set is not a group: product of {a:?} and {b:?} is missing")]
    NotAGroup { a: Branch, b: Branch },
    #[error("branch set is not subdirect: projection onto the {coordinate} is not onto")]
    NotSubdirect { coordinate: Coordinate },
    #[error(
        "section is not controllable: reachable set stabilizes at order {stabilized} of {total}"
    )]
    NotControllable { stabilized: usize, total: usize },
    #[error("window index {k} out of range 0..={ell}")]
    IndexOutOfRange { k: usize, ell: usize },
    #[error("path set is not closed under componentwise product")]
    PathSetNotClosed,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    LeftState,
    Label,
    RightState,
}

impl std::fmt::Display for Coordinate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Coordinate::LeftState => "left state",
            Coordinate::Label => "label",
            Coordinate::RightState => "right state",
        };
        f.write_str(s)
    }
}

/// One labeled edge (s, a, s') of a section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub left: usize,
    pub label: usize,
    pub right: usize,
}

/// A validated subdirect product B of Sigma x A x Sigma. Branches are
/// kept sorted by (left, label, right); the identity branch (0,0,0) is
/// always index 0, so branch indices form a group with identity 0.
#[derive(Clone, Debug)]
pub struct TrellisSection {
    sigma: FiniteGroup,
    alphabet: FiniteGroup,
    branches: Vec<Branch>,
    group: FiniteGroup,
    succ_by_state: Vec<Vec<usize>>,
    pred_by_state: Vec<Vec<usize>>,
}

impl TrellisSection {
    pub fn new(
        sigma: FiniteGroup,
        alphabet: FiniteGroup,
        triples: &[(usize, usize, usize)],
    ) -> Result<Self, TrellisError> {
        for (i, &(s, a, s2)) in triples.iter().enumerate() {
            if s >= sigma.order() || s2 >= sigma.order() || a >= alphabet.order() {
                return Err(TrellisError::InvalidTriple { index: i });
            }
        }
        let set: BTreeSet<Branch> = triples
            .iter()
            .map(|&(left, label, right)| Branch { left, label, right })
            .collect();
        if set.is_empty() {
            return Err(TrellisError::NotSubdirect {
                coordinate: Coordinate::LeftState,
            });
        }
        // Componentwise closure; a finite set closed under the product
        // is a subgroup, so identity and inverses follow.
        for &a in &set {
            for &b in &set {
                let c = Branch {
                    left: sigma.op(a.left, b.left),
                    label: alphabet.op(a.label, b.label),
                    right: sigma.op(a.right, b.right),
                };
                if !set.contains(&c) {
                    return Err(TrellisError::NotAGroup { a, b });
                }
            }
        }
        let branches: Vec<Branch> = set.into_iter().collect();
        debug_assert_eq!(
            branches[0],
            Branch {
                left: 0,
                label: 0,
                right: 0
            }
        );
        for (coordinate, proj) in [
            (Coordinate::LeftState, 0usize),
            (Coordinate::Label, 1),
            (Coordinate::RightState, 2),
        ] {
            let want = if proj == 1 {
                alphabet.order()
            } else {
                sigma.order()
            };
            let got: BTreeSet<usize> = branches
                .iter()
                .map(|b| match proj {
                    0 => b.left,
                    1 => b.label,
                    _ => b.right,
                })
                .collect();
            if got.len() != want {
                return Err(TrellisError::NotSubdirect { coordinate });
            }
        }
        let index: BTreeMap<Branch, usize> =
            branches.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let table: Vec<Vec<usize>> = branches
            .iter()
            .map(|a| {
                branches
                    .iter()
                    .map(|b| {
                        index[&Branch {
                            left: sigma.op(a.left, b.left),
                            label: alphabet.op(a.label, b.label),
                            right: sigma.op(a.right, b.right),
                        }]
                    })
                    .collect()
            })
            .collect();
        let group = FiniteGroup::from_table(table).expect("branch table inherits group axioms");
        let mut succ_by_state = vec![Vec::new(); sigma.order()];
        let mut pred_by_state = vec![Vec::new(); sigma.order()];
        for (i, b) in branches.iter().enumerate() {
            succ_by_state[b.left].push(i);
            pred_by_state[b.right].push(i);
        }
        Ok(TrellisSection {
            sigma,
            alphabet,
            branches,
            group,
            succ_by_state,
            pred_by_state,
        })
    }

    pub fn sigma(&self) -> &FiniteGroup {
        &self.sigma
    }

    pub fn alphabet(&self) -> &FiniteGroup {
        &self.alphabet
    }

    /// The branch group B on branch indices.
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branch(&self, i: usize) -> Branch {
        self.branches[i]
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_index(&self, b: Branch) -> Option<usize> {
        self.branches.binary_search(&b).ok()
    }

    /// X0: branches splitting from the identity state.
    pub fn splitting_kernel(&self) -> Subgroup {
        Subgroup::new(self.group(), self.succ_by_state[0].iter().copied())
            .expect("kernel of the left-state projection is a subgroup")
    }

    /// Y0: branches merging to the identity state.
    pub fn merging_kernel(&self) -> Subgroup {
        Subgroup::new(self.group(), self.pred_by_state[0].iter().copied())
            .expect("kernel of the right-state projection is a subgroup")
    }

    /// Branches that can follow b; always a left coset of X0.
    pub fn next_branch_set(&self, b: usize) -> Vec<usize> {
        self.succ_by_state[self.branches[b].right].clone()
    }

    pub fn prev_branch_set(&self, b: usize) -> Vec<usize> {
        self.pred_by_state[self.branches[b].left].clone()
    }

    /// N(H): union of the successor cosets of H.
    pub fn next_of_set(&self, h: &[usize]) -> Vec<usize> {
        let states: BTreeSet<usize> = h.iter().map(|&b| self.branches[b].right).collect();
        let mut out = BTreeSet::new();
        for s in states {
            out.extend(self.succ_by_state[s].iter().copied());
        }
        out.into_iter().collect()
    }

    /// P(H): the time reversal of N(H).
    pub fn prev_of_set(&self, h: &[usize]) -> Vec<usize> {
        let states: BTreeSet<usize> = h.iter().map(|&b| self.branches[b].left).collect();
        let mut out = BTreeSet::new();
        for s in states {
            out.extend(self.pred_by_state[s].iter().copied());
        }
        out.into_iter().collect()
    }

    /// Left states of a branch set.
    pub fn left_states(&self, h: &[usize]) -> Vec<usize> {
        let s: BTreeSet<usize> = h.iter().map(|&b| self.branches[b].left).collect();
        s.into_iter().collect()
    }

    /// Right states of a branch set.
    pub fn right_states(&self, h: &[usize]) -> Vec<usize> {
        let s: BTreeSet<usize> = h.iter().map(|&b| self.branches[b].right).collect();
        s.into_iter().collect()
    }

    /// The section with every branch (s, a, s') replaced by (s', a, s).
    pub fn reverse(&self) -> TrellisSection {
        let triples: Vec<(usize, usize, usize)> = self
            .branches
            .iter()
            .map(|b| (b.right, b.label, b.left))
            .collect();
        TrellisSection::new(self.sigma.clone(), self.alphabet.clone(), &triples)
            .expect("reversal preserves the section axioms")
    }

    /// Branch index map into `self.reverse()`.
    pub fn reverse_branch_map(&self) -> Vec<usize> {
        let rev = self.reverse();
        self.branches
            .iter()
            .map(|b| {
                rev.branch_index(Branch {
                    left: b.right,
                    label: b.label,
                    right: b.left,
                })
                .expect("reversed branch exists")
            })
            .collect()
    }
}

/// The chains 1 = X_{-1} in X_0 in ... in X_ell = B and the dual Y
/// chain, stored with the explicit index -1 entry so every cell formula
/// downstream can index uniformly.
#[derive(Clone, Debug)]
pub struct Chains {
    ell: usize,
    x: Vec<Subgroup>,
    y: Vec<Subgroup>,
}

impl Chains {
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// X_j; clamps to the trivial subgroup below -1 and to B above ell.
    pub fn x(&self, j: isize) -> &Subgroup {
        let i = (j + 1).clamp(0, self.ell as isize + 1) as usize;
        &self.x[i]
    }

    /// Y_i with the same clamping convention.
    pub fn y(&self, i: isize) -> &Subgroup {
        let idx = (i + 1).clamp(0, self.ell as isize + 1) as usize;
        &self.y[idx]
    }

    pub fn x_orders(&self) -> Vec<usize> {
        self.x.iter().map(|s| s.order()).collect()
    }

    pub fn y_orders(&self) -> Vec<usize> {
        self.y.iter().map(|s| s.order()).collect()
    }

    #[cfg(test)]
    pub(crate) fn raw(ell: usize, x: Vec<Subgroup>, y: Vec<Subgroup>) -> Self {
        Chains { ell, x, y }
    }
}

/// Iterates N on X0 (and P on Y0) until the whole branch group is
/// reached. The controllability index ell is the least l >= 1 at which
/// the X chain hits B, so memoryless sections report ell = 1 with a
/// repeated top entry. Stabilizing early is the non-controllable case.
pub fn compute_chains(sec: &TrellisSection) -> Result<Chains, TrellisError> {
    let total = sec.branch_count();
    let grow = |start: Subgroup, forward: bool| -> Result<Vec<Subgroup>, TrellisError> {
        let mut chain = vec![Subgroup::trivial(), start];
        loop {
            let last = chain.last().unwrap();
            if last.order() == total {
                break;
            }
            let next = if forward {
                sec.next_of_set(last.elements())
            } else {
                sec.prev_of_set(last.elements())
            };
            if next.len() == last.order() {
                return Err(TrellisError::NotControllable {
                    stabilized: next.len(),
                    total,
                });
            }
            chain.push(Subgroup::new(sec.group(), next)?);
        }
        if chain.len() == 2 {
            // X0 = B already; the index is still defined as at least 1.
            chain.push(chain[1].clone());
        }
        Ok(chain)
    };
    let x = grow(sec.splitting_kernel(), true)?;
    let y = grow(sec.merging_kernel(), false)?;
    assert_eq!(x.len(), y.len(), "forward and reverse indices agree");
    let ell = x.len() - 2;
    Ok(Chains { ell, x, y })
}

/// A set of equal-length branch-index paths, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSet {
    pub k: usize,
    paths: Vec<Vec<usize>>,
}

impl PathSet {
    pub fn new(k: usize, mut paths: Vec<Vec<usize>>) -> Self {
        paths.sort();
        paths.dedup();
        PathSet { k, paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn index_of(&self, path: &[usize]) -> Option<usize> {
        self.paths.binary_search_by(|p| p.as_slice().cmp(path)).ok()
    }

    /// Branch set appearing at epoch j.
    pub fn layer(&self, j: usize) -> Vec<usize> {
        let s: BTreeSet<usize> = self.paths.iter().map(|p| p[j]).collect();
        s.into_iter().collect()
    }
}

/// The group on path indices under componentwise product, or an error
/// if the set is not closed.
pub fn path_group(sec: &TrellisSection, set: &PathSet) -> Result<FiniteGroup, TrellisError> {
    let n = set.len();
    let mut table = vec![vec![0usize; n]; n];
    for (i, p) in set.paths().iter().enumerate() {
        for (j, q) in set.paths().iter().enumerate() {
            let prod: Vec<usize> = p
                .iter()
                .zip(q.iter())
                .map(|(&a, &b)| sec.group().op(a, b))
                .collect();
            table[i][j] = set.index_of(&prod).ok_or(TrellisError::PathSetNotClosed)?;
        }
    }
    FiniteGroup::from_table(table).map_err(TrellisError::from)
}

/// Checks consecutive state matching.
pub fn validate_path(sec: &TrellisSection, path: &[usize]) -> Result<(), usize> {
    for (t, w) in path.windows(2).enumerate() {
        if sec.branch(w[0]).right != sec.branch(w[1]).left {
            return Err(t + 1);
        }
    }
    Ok(())
}

fn paths_through_layers(sec: &TrellisSection, layers: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = layers[0].iter().map(|&b| vec![b]).collect();
    for layer in &layers[1..] {
        let members: BTreeSet<usize> = layer.iter().copied().collect();
        let mut next = Vec::new();
        for p in acc {
            let last = *p.last().unwrap();
            for &e in &sec.succ_by_state[sec.branch(last).right] {
                if members.contains(&e) {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
        }
        acc = next;
    }
    acc
}

/// C_{[0,k]}: every path (b_0..b_k) with b_j in X_j meet Y_{k-j} and
/// consecutive states matching; these are exactly the codewords
/// supported on the window.
pub fn enumerate_segment_paths(
    sec: &TrellisSection,
    chains: &Chains,
    k: usize,
) -> Result<PathSet, TrellisError> {
    if k > chains.ell() {
        return Err(TrellisError::IndexOutOfRange {
            k,
            ell: chains.ell(),
        });
    }
    let layers: Vec<Vec<usize>> = (0..=k)
        .map(|j| {
            chains
                .x(j as isize)
                .elements()
                .iter()
                .copied()
                .filter(|&b| chains.y((k - j) as isize).contains(b))
                .collect()
        })
        .collect();
    Ok(PathSet::new(k, paths_through_layers(sec, &layers)))
}

/// N^{[0,k]}(H): all length-(k+1) path segments starting in H.
pub fn segment_paths_from(sec: &TrellisSection, start: &[usize], k: usize) -> PathSet {
    let mut acc: Vec<Vec<usize>> = start.iter().map(|&b| vec![b]).collect();
    for _ in 0..k {
        let mut next = Vec::new();
        for p in acc {
            let last = *p.last().unwrap();
            for &e in &sec.succ_by_state[sec.branch(last).right] {
                let mut q = p.clone();
                q.push(e);
                next.push(q);
            }
        }
        acc = next;
    }
    PathSet::new(k, acc)
}

/// The paths splitting from the identity state over a full window
/// [0, ell], together with the branch set at each epoch.
#[derive(Clone, Debug)]
pub struct Pletty {
    pub paths: PathSet,
    pub layers: Vec<Vec<usize>>,
}

pub fn pletty(sec: &TrellisSection, chains: &Chains) -> Pletty {
    let x0 = sec.splitting_kernel();
    let paths = segment_paths_from(sec, x0.elements(), chains.ell());
    let layers = (0..=chains.ell()).map(|j| paths.layer(j)).collect();
    Pletty { paths, layers }
}

/// N^j(H) by iterating the next-branch map.
pub fn iterate_next(sec: &TrellisSection, h: &[usize], j: usize) -> Vec<usize> {
    let mut cur = h.to_vec();
    for _ in 0..j {
        cur = sec.next_of_set(&cur);
    }
    cur
}

/// P^j(H) by iterating the previous-branch map.
pub fn iterate_prev(sec: &TrellisSection, h: &[usize], j: usize) -> Vec<usize> {
    let mut cur = h.to_vec();
    for _ in 0..j {
        cur = sec.prev_of_set(&cur);
    }
    cur
}

/// Sanity checks bundled with chain construction: kernels and chain
/// entries are normal in B, the two index computations agree, and the
/// state sets stitch (X_j right states = X_{j+1} left states).
pub fn verify_chain_structure(sec: &TrellisSection, chains: &Chains) -> bool {
    let b = sec.group();
    for j in -1..=(chains.ell() as isize) {
        if !is_normal(b, chains.x(j)) || !is_normal(b, chains.y(j)) {
            return false;
        }
    }
    for j in -1..(chains.ell() as isize) {
        if sec.right_states(chains.x(j).elements()) != sec.left_states(chains.x(j + 1).elements()) {
            return false;
        }
        if sec.right_states(chains.y(j + 1).elements()) != sec.left_states(chains.y(j).elements()) {
            return false;
        }
    }
    true
}
