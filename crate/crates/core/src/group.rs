//! Finite group arithmetic on Cayley tables.
//!
//! Every group is presented as an `order x order` table over element
//! indices `0..order`, with the identity pinned at index 0. Subgroups,
//! cosets and quotients are layered on top of plain index arithmetic,
//! which keeps exhaustive verification cheap at the orders handled here
//! (a few hundred elements at most).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Default order cap for the brute-force isomorphism search.
pub const ISO_ORDER_CAP: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("table is not closed (Latin property fails at row {a}, column {b})")]
    NotClosed { a: usize, b: usize },
    #[error("associativity fails on ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("index 0 is not a two-sided identity on element {witness}")]
    NoIdentityAtZero { witness: usize },
    #[error("element {witness} has no two-sided inverse")]
    NoInverse { witness: usize },
    #[error("set is not a subgroup: product of {a} and {b} escapes the set")]
    NotASubgroup { a: usize, b: usize },
    #[error("subgroup is not normal: conjugate of {h} by {g} escapes")]
    NotNormal { g: usize, h: usize },
    #[error("order {order} exceeds the configured cap {cap}")]
    TooLarge { order: usize, cap: usize },
}

/// A finite group given by its Cayley table, identity at index 0.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order={})", self.order)
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: squareness, closure (Latin square),
    /// identity at index 0, two-sided inverses, associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::NoIdentityAtZero { witness: 0 });
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::NotSquare {
                    row: r,
                    len: row.len(),
                    expected: order,
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(GroupError::NotClosed { a: r, b: c });
                }
            }
        }
        // Latin square: each row and column is a permutation.
        for r in 0..order {
            let mut seen = vec![false; order];
            for c in 0..order {
                let v = table[r][c];
                if seen[v] {
                    return Err(GroupError::NotClosed { a: r, b: c });
                }
                seen[v] = true;
            }
        }
        for c in 0..order {
            let mut seen = vec![false; order];
            for r in 0..order {
                let v = table[r][c];
                if seen[v] {
                    return Err(GroupError::NotClosed { a: r, b: c });
                }
                seen[v] = true;
            }
        }
        for x in 0..order {
            if table[0][x] != x || table[x][0] != x {
                return Err(GroupError::NoIdentityAtZero { witness: x });
            }
        }
        let mut inv = vec![usize::MAX; order];
        for x in 0..order {
            let y = (0..order)
                .find(|&y| table[x][y] == 0 && table[y][x] == 0)
                .ok_or(GroupError::NoInverse { witness: x })?;
            inv[x] = y;
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(FiniteGroup { order, table, inv })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// g h g^-1
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.op(self.op(g, h), self.inv(g))
    }

    /// Left-to-right product of a sequence of elements. All ordered
    /// products in this crate funnel through here so the evaluation
    /// order is fixed in one place.
    pub fn product<I: IntoIterator<Item = usize>>(&self, elems: I) -> usize {
        elems.into_iter().fold(0, |acc, x| self.op(acc, x))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut n = 1;
        let mut x = a;
        while x != 0 {
            x = self.op(x, a);
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.op(a, b) == self.op(b, a)))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Z_n under addition.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::from_table(table).expect("cyclic table is a group")
    }

    /// Symmetric group on n points; elements are the permutations of
    /// 0..n in lexicographic order, composition applies the right
    /// factor first: (a*b)(i) = a[b[i]].
    pub fn symmetric(n: usize) -> Self {
        assert!(n >= 1);
        let perms = all_permutations(n);
        let index: BTreeMap<&[usize], usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let c: Vec<usize> = (0..n).map(|i| a[b[i]]).collect();
                        index[c.as_slice()]
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table).expect("symmetric table is a group")
    }

    /// Direct product; the pair (a, b) is indexed as a * other.order() + b.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let n2 = other.order;
        let order = self.order * n2;
        let mut table = vec![vec![0usize; order]; order];
        for a1 in 0..self.order {
            for a2 in 0..n2 {
                for b1 in 0..self.order {
                    for b2 in 0..n2 {
                        table[a1 * n2 + a2][b1 * n2 + b2] = self.op(a1, b1) * n2 + other.op(a2, b2);
                    }
                }
            }
        }
        FiniteGroup::from_table(table).expect("product table is a group")
    }

    /// The subgroup as a standalone group on indices 0..|H|, plus the
    /// map from new indices back to parent elements. Element 0 stays
    /// the identity because subgroup element lists are sorted.
    pub fn restrict(&self, sub: &Subgroup) -> (FiniteGroup, Vec<usize>) {
        let elems = sub.elements().to_vec();
        let back: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let table = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| back[&self.op(a, b)]).collect())
            .collect();
        let g = FiniteGroup::from_table(table).expect("restricted table is a group");
        (g, elems)
    }
}

/// Permutations of 0..n in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A subgroup, stored as its sorted element list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.elements)
    }
}

impl Subgroup {
    /// Checks closure (which in a finite group implies identity and
    /// inverses) before accepting the set.
    pub fn new<I: IntoIterator<Item = usize>>(
        g: &FiniteGroup,
        elems: I,
    ) -> Result<Self, GroupError> {
        let set: BTreeSet<usize> = elems.into_iter().collect();
        if set.is_empty() || !set.contains(&0) {
            return Err(GroupError::NotASubgroup { a: 0, b: 0 });
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&g.op(a, b)) {
                    return Err(GroupError::NotASubgroup { a, b });
                }
            }
        }
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    pub fn trivial() -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup {
            elements: (0..g.order()).collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

/// Smallest subgroup containing the seed, by iterating products to a
/// fixpoint. An empty seed yields the trivial subgroup.
pub fn subgroup_closure(g: &FiniteGroup, seed: &[usize]) -> Subgroup {
    let mut set: BTreeSet<usize> = seed.iter().copied().collect();
    set.insert(0);
    loop {
        let mut grew = false;
        let snapshot: Vec<usize> = set.iter().copied().collect();
        for &a in &snapshot {
            for &b in &snapshot {
                if set.insert(g.op(a, b)) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Subgroup {
        elements: set.into_iter().collect(),
    }
}

/// True iff g H g^-1 = H for every g.
pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    g.elements()
        .all(|x| h.elements().iter().all(|&y| h.contains(g.conjugate(x, y))))
}

/// The setwise product {h1 * h2}.
pub fn complex_product(g: &FiniteGroup, h1: &[usize], h2: &[usize]) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for &a in h1 {
        for &b in h2 {
            out.insert(g.op(a, b));
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Deterministic pick from a sorted candidate list; `Lex` takes the
/// smallest entry, `RevLex` the largest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Chooser {
    #[default]
    Lex,
    RevLex,
}

impl Chooser {
    pub fn pick<'a, T>(&self, sorted: &'a [T]) -> &'a T {
        match self {
            Chooser::Lex => sorted.first().expect("nonempty candidate list"),
            Chooser::RevLex => sorted.last().expect("nonempty candidate list"),
        }
    }
}

/// The left or right cosets of a subgroup, ordered by smallest member;
/// coset 0 is the subgroup itself.
#[derive(Clone, Debug)]
pub struct CosetPartition {
    pub side: Side,
    cosets: Vec<Vec<usize>>,
    representatives: Vec<usize>,
    coset_of: Vec<usize>,
}

impl CosetPartition {
    pub fn new(g: &FiniteGroup, h: &Subgroup, side: Side) -> Self {
        Self::with_chooser(g, h, side, Chooser::Lex)
    }

    pub fn with_chooser(g: &FiniteGroup, h: &Subgroup, side: Side, chooser: Chooser) -> Self {
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut cosets = Vec::new();
        for x in g.elements() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = h
                .elements()
                .iter()
                .map(|&n| match side {
                    Side::Left => g.op(x, n),
                    Side::Right => g.op(n, x),
                })
                .collect::<BTreeSet<usize>>()
                .into_iter()
                .collect();
            let idx = cosets.len();
            for &m in &members {
                coset_of[m] = idx;
            }
            cosets.push(members);
        }
        // Iterating x from 0 upward already orders cosets by smallest
        // member, with the subgroup (containing 0) first.
        let representatives = cosets.iter().map(|c| *chooser.pick(c)).collect();
        CosetPartition {
            side,
            cosets,
            representatives,
            coset_of,
        }
    }

    pub fn count(&self) -> usize {
        self.cosets.len()
    }

    pub fn coset(&self, i: usize) -> &[usize] {
        &self.cosets[i]
    }

    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    pub fn representative(&self, i: usize) -> usize {
        self.representatives[i]
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }
}

/// G/N for a normal subgroup N: a group on coset labels, label 0 = N,
/// with the projection map and smallest-member representatives.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    group: FiniteGroup,
    projection: Vec<usize>,
    representatives: Vec<usize>,
    cosets: Vec<Vec<usize>>,
}

impl QuotientGroup {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Coset label of a parent element.
    pub fn project(&self, x: usize) -> usize {
        self.projection[x]
    }

    pub fn representative(&self, label: usize) -> usize {
        self.representatives[label]
    }

    pub fn coset(&self, label: usize) -> &[usize] {
        &self.cosets[label]
    }
}

/// Builds G/N, rejecting non-normal N. The induced table is verified to
/// be well defined on whole cosets, which doubles as an exhaustive
/// check that the projection is a homomorphism.
pub fn quotient(g: &FiniteGroup, n: &Subgroup) -> Result<QuotientGroup, GroupError> {
    for x in g.elements() {
        for &y in n.elements() {
            if !n.contains(g.conjugate(x, y)) {
                return Err(GroupError::NotNormal { g: x, h: y });
            }
        }
    }
    let part = CosetPartition::new(g, n, Side::Left);
    let m = part.count();
    let mut table = vec![vec![0usize; m]; m];
    for a in 0..m {
        for b in 0..m {
            let label = part.coset_of(g.op(part.representative(a), part.representative(b)));
            table[a][b] = label;
            for &x in part.coset(a) {
                for &y in part.coset(b) {
                    debug_assert_eq!(part.coset_of(g.op(x, y)), label);
                }
            }
        }
    }
    let group = FiniteGroup::from_table(table).expect("quotient table is a group");
    Ok(QuotientGroup {
        group,
        projection: (0..g.order()).map(|x| part.coset_of(x)).collect(),
        representatives: part.representatives().to_vec(),
        cosets: (0..m).map(|i| part.coset(i).to_vec()).collect(),
    })
}

/// A quotient big/small taken inside an ambient group: `ambient` is
/// `big` restricted to its own indices, `to_parent` maps those back.
#[derive(Clone, Debug)]
pub struct InnerQuotient {
    pub ambient: FiniteGroup,
    pub to_parent: Vec<usize>,
    parent_to_local: BTreeMap<usize, usize>,
    pub quotient: QuotientGroup,
}

impl InnerQuotient {
    pub fn order(&self) -> usize {
        self.quotient.order()
    }

    /// Coset label of a parent element, if it lies in `big`.
    pub fn label_of(&self, parent_elem: usize) -> Option<usize> {
        self.parent_to_local
            .get(&parent_elem)
            .map(|&l| self.quotient.project(l))
    }
}

pub fn quotient_within(
    g: &FiniteGroup,
    big: &Subgroup,
    small: &Subgroup,
) -> Result<InnerQuotient, GroupError> {
    let (ambient, to_parent) = g.restrict(big);
    let parent_to_local: BTreeMap<usize, usize> =
        to_parent.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let local_small: Vec<usize> = small
        .elements()
        .iter()
        .map(|e| {
            *parent_to_local
                .get(e)
                .expect("small subgroup must be contained in big")
        })
        .collect();
    let n = Subgroup::new(&ambient, local_small)?;
    let quotient = quotient(&ambient, &n)?;
    Ok(InnerQuotient {
        ambient,
        to_parent,
        parent_to_local,
        quotient,
    })
}

pub fn are_isomorphic(g1: &FiniteGroup, g2: &FiniteGroup) -> Result<bool, GroupError> {
    are_isomorphic_with_cap(g1, g2, ISO_ORDER_CAP)
}

/// Brute-force isomorphism test: backtracking over generator images,
/// pruned by element orders and propagated by closure.
pub fn are_isomorphic_with_cap(
    g1: &FiniteGroup,
    g2: &FiniteGroup,
    cap: usize,
) -> Result<bool, GroupError> {
    if g1.order() != g2.order() {
        return Ok(false);
    }
    let order = g1.order();
    if order > cap {
        return Err(GroupError::TooLarge { order, cap });
    }
    let mut orders1: Vec<usize> = g1.elements().map(|x| g1.element_order(x)).collect();
    let mut orders2: Vec<usize> = g2.elements().map(|x| g2.element_order(x)).collect();
    let o1 = orders1.clone();
    let o2 = orders2.clone();
    orders1.sort_unstable();
    orders2.sort_unstable();
    if orders1 != orders2 || g1.is_abelian() != g2.is_abelian() {
        return Ok(false);
    }
    let gens = generating_sequence(g1);
    let mut phi = vec![usize::MAX; order];
    let mut used = vec![false; order];
    phi[0] = 0;
    used[0] = true;
    Ok(extend_iso(g1, g2, &gens, 0, &o1, &o2, &mut phi, &mut used))
}

fn generating_sequence(g: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = Subgroup::trivial();
    for e in g.elements() {
        if !span.contains(e) {
            gens.push(e);
            let mut seed = span.elements().to_vec();
            seed.push(e);
            span = subgroup_closure(g, &seed);
            if span.order() == g.order() {
                break;
            }
        }
    }
    gens
}

#[allow(clippy::too_many_arguments)]
fn extend_iso(
    g1: &FiniteGroup,
    g2: &FiniteGroup,
    gens: &[usize],
    idx: usize,
    o1: &[usize],
    o2: &[usize],
    phi: &mut [usize],
    used: &mut [bool],
) -> bool {
    if idx == gens.len() {
        return true;
    }
    let gen = gens[idx];
    for c in g2.elements() {
        if used[c] || o2[c] != o1[gen] {
            continue;
        }
        let saved_phi = phi.to_vec();
        let saved_used = used.to_vec();
        if assign_and_close(g1, g2, gen, c, phi, used)
            && extend_iso(g1, g2, gens, idx + 1, o1, o2, phi, used)
        {
            return true;
        }
        phi.copy_from_slice(&saved_phi);
        used.copy_from_slice(&saved_used);
    }
    false
}

/// Sets phi(gen) = c and propagates products through everything already
/// assigned; fails on any homomorphism or injectivity conflict.
fn assign_and_close(
    g1: &FiniteGroup,
    g2: &FiniteGroup,
    gen: usize,
    c: usize,
    phi: &mut [usize],
    used: &mut [bool],
) -> bool {
    let mut known: Vec<usize> = (0..phi.len()).filter(|&x| phi[x] != usize::MAX).collect();
    let mut queue = vec![(gen, c)];
    while let Some((x, y)) = queue.pop() {
        if phi[x] != usize::MAX {
            if phi[x] != y {
                return false;
            }
            continue;
        }
        if used[y] {
            return false;
        }
        phi[x] = y;
        used[y] = true;
        for &k in &known {
            queue.push((g1.op(x, k), g2.op(y, phi[k])));
            queue.push((g1.op(k, x), g2.op(phi[k], y)));
        }
        queue.push((g1.op(x, x), g2.op(y, y)));
        known.push(x);
    }
    true
}
