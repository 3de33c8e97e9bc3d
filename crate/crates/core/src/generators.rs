//! Shortest-length generator sequences and the transversal structure
//! they induce.
//!
//! For each window width k the span-(k+1) codewords modulo combinations
//! of shorter ones form the granule; one representative path per coset
//! (identity for the subgroup coset) is a generator, and its epoch-j
//! branches r[j][k][u] are coset representatives of the matrix quotient
//! Q_{j,k}. Together the components form a complete system of coset
//! representatives for the chain read off the controllable matrix, so
//! every branch factors uniquely through an ordered product over the
//! label array.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::group::{Chooser, FiniteGroup, GroupError, Subgroup};
use crate::schreier::{ControllableMatrix, SchreierError};
use crate::shiftbank::UMatrix;
use crate::trellis::{
    enumerate_segment_paths, path_group, segment_paths_from, Chains, PathSet, TrellisError,
    TrellisSection,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("branch {element} admits {count} factorizations, expected exactly one")]
    Factorization { element: usize, count: usize },
    #[error("generator component ({j}, {k}, {u}) escapes its layer")]
    ComponentOutOfLayer { j: usize, k: usize, u: usize },
    #[error("components at ({j}, {k}) do not form a transversal")]
    NotATransversal { j: usize, k: usize },
    #[error("reversed transversal fails at window {k}")]
    ReversedTransversal { k: usize },
    #[error("granule-to-window correspondence fails at window {k}, coset {coset}")]
    GranuleIso { k: usize, coset: usize },
    #[error("change of basis is not single-valued at ({j}, {k}): one memory index demands two images of label {u}")]
    Inconsistent { j: usize, k: usize, u: usize },
    #[error("enumeration size {size} exceeds cap {cap}")]
    TooLarge { size: u64, cap: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Trellis(#[from] TrellisError),
    #[error(transparent)]
    Schreier(#[from] SchreierError),
}

/// The span-(k+1) codeword group and its boundary subgroup of
/// combinations of shorter codewords.
pub struct CodeSegment {
    pub k: usize,
    pub full: PathSet,
    pub boundary: PathSet,
}

/// Builds C_{[0,k]} and the product of the two embedded shorter-window
/// groups (identity appended on the right, prepended on the left). The
/// product is closure-verified before use.
pub fn code_segment(
    sec: &TrellisSection,
    chains: &Chains,
    k: usize,
) -> Result<CodeSegment, GeneratorError> {
    let full = enumerate_segment_paths(sec, chains, k)?;
    let boundary = if k == 0 {
        PathSet::new(0, vec![vec![0]])
    } else {
        let shorter = enumerate_segment_paths(sec, chains, k - 1)?;
        let mut prods = Vec::new();
        for p in shorter.paths() {
            for q in shorter.paths() {
                // (p, 1) * (1, q) componentwise.
                let mut r = Vec::with_capacity(k + 1);
                r.push(p[0]);
                for t in 1..k {
                    r.push(sec.group().op(p[t], q[t - 1]));
                }
                r.push(q[k - 1]);
                prods.push(r);
            }
        }
        PathSet::new(k, prods)
    };
    for p in boundary.paths() {
        debug_assert!(
            full.index_of(p).is_some(),
            "boundary sits inside the window group"
        );
    }
    // Closure safety net: the product of two subgroups need not be a
    // subgroup in general, so verify before relying on it.
    path_group(sec, &boundary)?;
    Ok(CodeSegment { k, full, boundary })
}

/// The granule: the window group over its boundary subgroup, realized
/// on path indices with coset 0 the boundary.
pub struct Granule {
    pub k: usize,
    pub full: PathSet,
    group: FiniteGroup,
    coset_of: Vec<usize>,
    cosets: Vec<Vec<usize>>,
    quotient: FiniteGroup,
}

impl Granule {
    pub fn order(&self) -> usize {
        self.quotient.order()
    }

    pub fn coset_of_path(&self, path_ix: usize) -> usize {
        self.coset_of[path_ix]
    }

    /// Path indices of a coset, ascending.
    pub fn coset(&self, label: usize) -> &[usize] {
        &self.cosets[label]
    }

    pub fn quotient(&self) -> &FiniteGroup {
        &self.quotient
    }

    pub fn path_group(&self) -> &FiniteGroup {
        &self.group
    }
}

pub fn granule(sec: &TrellisSection, seg: &CodeSegment) -> Result<Granule, GeneratorError> {
    let group = path_group(sec, &seg.full)?;
    let boundary_ix: Vec<usize> = seg
        .boundary
        .paths()
        .iter()
        .map(|p| {
            seg.full
                .index_of(p)
                .expect("boundary path is a window path")
        })
        .collect();
    let sub = Subgroup::new(&group, boundary_ix)?;
    let q = crate::group::quotient(&group, &sub)?;
    let coset_of: Vec<usize> = (0..group.order()).map(|i| q.project(i)).collect();
    let cosets = (0..q.order()).map(|l| q.coset(l).to_vec()).collect();
    Ok(Granule {
        k: seg.k,
        full: seg.full.clone(),
        group,
        coset_of,
        cosets,
        quotient: q.group().clone(),
    })
}

/// One generator path per granule coset, with the component array
/// r[j][k][u] and the label sizes per window.
pub struct GeneratorBasis {
    ell: usize,
    /// gens[k][u]: branch-index path of length k+1; gens[k][0] is the
    /// identity path.
    gens: Vec<Vec<Vec<usize>>>,
    /// components[(j, k)][u] = r_{j,k}(u).
    components: BTreeMap<(usize, usize), Vec<usize>>,
}

impl GeneratorBasis {
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// |U_{j,k}| for every j: the granule order of window k.
    pub fn size(&self, k: usize) -> usize {
        self.gens[k].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.gens.iter().map(|g| g.len()).collect()
    }

    pub fn generator(&self, k: usize, u: usize) -> &[usize] {
        &self.gens[k][u]
    }

    pub fn generators(&self, k: usize) -> &[Vec<usize>] {
        &self.gens[k]
    }

    pub fn component(&self, j: usize, k: usize, u: usize) -> usize {
        self.components[&(j, k)][u]
    }

    /// Copy with one component replaced; for negative tests.
    pub fn with_component(&self, j: usize, k: usize, u: usize, branch: usize) -> GeneratorBasis {
        let mut out = GeneratorBasis {
            ell: self.ell,
            gens: self.gens.clone(),
            components: self.components.clone(),
        };
        out.components.get_mut(&(j, k)).unwrap()[u] = branch;
        out.gens[k][u][j] = branch;
        out
    }
}

/// Picks one representative path per granule coset (the chooser decides
/// which, identity for coset 0) and records the component array.
/// Component membership in the layers X_j meet Y_{k-j} and the span of
/// nonidentity generators are checked on the way out.
pub fn extract_generators(
    chains: &Chains,
    granules: &[Granule],
    chooser: Chooser,
) -> Result<GeneratorBasis, GeneratorError> {
    let ell = chains.ell();
    assert_eq!(granules.len(), ell + 1);
    let mut gens = Vec::with_capacity(ell + 1);
    let mut components: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, gran) in granules.iter().enumerate() {
        let mut paths_for_k = Vec::with_capacity(gran.order());
        for u in 0..gran.order() {
            let path = if u == 0 {
                vec![0; k + 1]
            } else {
                let candidates: Vec<Vec<usize>> = gran
                    .coset(u)
                    .iter()
                    .map(|&ix| gran.full.paths()[ix].clone())
                    .collect();
                chooser.pick(&candidates).clone()
            };
            if u != 0 && (path[0] == 0 || path[k] == 0) {
                // A generator with identity at either end would have
                // span shorter than its window, i.e. sit in the boundary.
                return Err(GeneratorError::ComponentOutOfLayer { j: 0, k, u });
            }
            paths_for_k.push(path);
        }
        for j in 0..=k {
            let col: Vec<usize> = paths_for_k.iter().map(|p| p[j]).collect();
            for (u, &r) in col.iter().enumerate() {
                let in_layer =
                    chains.x(j as isize).contains(r) && chains.y((k - j) as isize).contains(r);
                if !in_layer {
                    return Err(GeneratorError::ComponentOutOfLayer { j, k, u });
                }
            }
            components.insert((j, k), col);
        }
        gens.push(paths_for_k);
    }
    Ok(GeneratorBasis {
        ell,
        gens,
        components,
    })
}

/// Factors a branch through the ordered product over the matrix chain,
/// peeling from the top cell down. Fails if some level has no (or more
/// than one) matching representative, which flags a broken transversal.
pub fn factor_element(
    sec: &TrellisSection,
    m: &ControllableMatrix,
    basis: &GeneratorBasis,
    b: usize,
) -> Result<UMatrix, GeneratorError> {
    let ell = basis.ell();
    let g = sec.group();
    let mut labels = UMatrix::zero(ell);
    let mut cur = b;
    for j in (0..=ell).rev() {
        for k in (j..=ell).rev() {
            let below = m.cell_below(j, k);
            let mut hit = None;
            for u in 0..basis.size(k) {
                let r = basis.component(j, k, u);
                if below.contains(g.op(cur, g.inv(r))) {
                    if hit.is_some() {
                        return Err(GeneratorError::NotATransversal { j, k });
                    }
                    hit = Some(u);
                }
            }
            let u = hit.ok_or(GeneratorError::NotATransversal { j, k })?;
            labels.set(j, k, u);
            cur = g.op(cur, g.inv(basis.component(j, k, u)));
        }
    }
    if cur != 0 {
        return Err(GeneratorError::Factorization {
            element: b,
            count: 0,
        });
    }
    Ok(labels)
}

/// The ordered product over a label array: columns left to right, each
/// column bottom row up.
pub fn product_of_labels(sec: &TrellisSection, basis: &GeneratorBasis, labels: &UMatrix) -> usize {
    let ell = basis.ell();
    let mut acc = 0;
    for j in 0..=ell {
        for k in j..=ell {
            acc = sec.group().op(acc, basis.component(j, k, labels.get(j, k)));
        }
    }
    acc
}

fn all_label_arrays(basis: &GeneratorBasis) -> Vec<UMatrix> {
    let ell = basis.ell();
    let mut out = vec![UMatrix::zero(ell)];
    for j in 0..=ell {
        for k in j..=ell {
            let mut next = Vec::with_capacity(out.len() * basis.size(k));
            for m in &out {
                for u in 0..basis.size(k) {
                    let mut m2 = m.clone();
                    m2.set(j, k, u);
                    next.push(m2);
                }
            }
            out = next;
        }
    }
    out
}

/// Exhaustively checks that label arrays biject onto B under the
/// ordered product: every branch is hit exactly once.
pub fn verify_complete_system(
    sec: &TrellisSection,
    basis: &GeneratorBasis,
) -> Result<(), GeneratorError> {
    let mut counts = vec![0usize; sec.branch_count()];
    let arrays = all_label_arrays(basis);
    for labels in &arrays {
        counts[product_of_labels(sec, basis, labels)] += 1;
    }
    if arrays.len() != sec.branch_count() {
        return Err(GeneratorError::Factorization {
            element: 0,
            count: arrays.len(),
        });
    }
    for (b, &c) in counts.iter().enumerate() {
        if c != 1 {
            return Err(GeneratorError::Factorization {
                element: b,
                count: c,
            });
        }
    }
    Ok(())
}

/// Per-cell transversal property: the components r_{j,k}(u) hit every
/// coset of Q_{j,k} exactly once.
pub fn verify_component_transversals(
    cells: &crate::schreier::QuotientCells,
    basis: &GeneratorBasis,
) -> Result<(), GeneratorError> {
    for k in 0..=basis.ell() {
        for j in 0..=k {
            let q = cells.q(j, k);
            let mut seen = vec![false; q.order()];
            for u in 0..basis.size(k) {
                let label = q
                    .label_of(basis.component(j, k, u))
                    .ok_or(GeneratorError::ComponentOutOfLayer { j, k, u })?;
                if seen[label] {
                    return Err(GeneratorError::NotATransversal { j, k });
                }
                seen[label] = true;
            }
            if seen.iter().any(|&s| !s) {
                return Err(GeneratorError::NotATransversal { j, k });
            }
        }
    }
    Ok(())
}

/// The same generator paths, reversed in time, must be a transversal of
/// the window quotients of the reversed section.
pub fn verify_reversed_transversal(
    sec: &TrellisSection,
    basis: &GeneratorBasis,
) -> Result<(), GeneratorError> {
    let map = sec.reverse_branch_map();
    let rev = sec.reverse();
    let rev_chains = crate::trellis::compute_chains(&rev)?;
    let rev_delta = crate::schreier::delta_chain(&rev, &rev_chains);
    for k in 0..=basis.ell() {
        let wq = crate::schreier::window_quotient(&rev, &rev_delta, k)
            .map_err(|_| GeneratorError::ReversedTransversal { k })?;
        let mut seen = vec![false; wq.inner.order()];
        for u in 0..basis.size(k) {
            let mut path: Vec<usize> = basis.generator(k, u).iter().map(|&b| map[b]).collect();
            path.reverse();
            let ix = wq
                .big
                .index_of(&path)
                .ok_or(GeneratorError::ReversedTransversal { k })?;
            let label = wq
                .inner
                .label_of(ix)
                .ok_or(GeneratorError::ReversedTransversal { k })?;
            if seen[label] {
                return Err(GeneratorError::ReversedTransversal { k });
            }
            seen[label] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(GeneratorError::ReversedTransversal { k });
        }
    }
    Ok(())
}

/// The coset-by-coset correspondence between the granule and the window
/// quotient: every path of a granule coset lands in one window coset,
/// the assignment is bijective, multiplicative, and its image is the
/// window set of paths starting in the shifted first-column coset.
pub fn verify_granule_window_iso(
    sec: &TrellisSection,
    delta: &crate::schreier::DeltaChain,
    granules: &[Granule],
) -> Result<(), GeneratorError> {
    for gran in granules {
        let k = gran.k;
        let wq = crate::schreier::window_quotient(sec, delta, k)
            .map_err(|_| GeneratorError::GranuleIso { k, coset: 0 })?;
        let mut image = vec![usize::MAX; gran.order()];
        for coset in 0..gran.order() {
            let mut labels = std::collections::BTreeSet::new();
            for &pix in gran.coset(coset) {
                let path = &gran.full.paths()[pix];
                let ix = wq
                    .big
                    .index_of(path)
                    .ok_or(GeneratorError::GranuleIso { k, coset })?;
                labels.insert(wq.inner.label_of(ix).unwrap());
            }
            if labels.len() != 1 {
                return Err(GeneratorError::GranuleIso { k, coset });
            }
            image[coset] = labels.into_iter().next().unwrap();

            // The window coset is exactly the paths that start in the
            // first-column coset delta_{k-1} * c_0.
            let c0 = gran.full.paths()[gran.coset(coset)[0]][0];
            let start = crate::group::complex_product(
                sec.group(),
                delta.delta(k as isize - 1).elements(),
                &[c0],
            );
            let explicit = segment_paths_from(sec, &start, k);
            let got: Vec<usize> = wq
                .big
                .paths()
                .iter()
                .enumerate()
                .filter(|(ix, _)| wq.inner.label_of(*ix).unwrap() == image[coset])
                .map(|(_, p)| wq.big.index_of(p).unwrap())
                .collect();
            let want: Vec<usize> = explicit
                .paths()
                .iter()
                .map(|p| {
                    wq.big
                        .index_of(p)
                        .expect("shifted coset paths are window paths")
                })
                .collect();
            if got != want {
                return Err(GeneratorError::GranuleIso { k, coset });
            }
        }
        // Bijective...
        let mut sorted = image.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != wq.inner.order() || image.len() != wq.inner.order() {
            return Err(GeneratorError::GranuleIso { k, coset: 0 });
        }
        // ...and multiplicative with respect to both quotient tables.
        let lam = wq.inner.quotient.group();
        for a in 0..gran.order() {
            for b in 0..gran.order() {
                let prod = gran.quotient().op(a, b);
                if image[prod] != lam.op(image[a], image[b]) {
                    return Err(GeneratorError::GranuleIso { k, coset: a });
                }
            }
        }
    }
    Ok(())
}

/// Permutation families per cell, keyed by the flattened masked memory
/// index.
type LabelFamilies<T> = BTreeMap<Vec<usize>, T>;

/// Label permutations relating two bases, keyed by cell and by the
/// masked memory index of the source labels.
pub struct BasisChangeMap {
    /// beta[(j, k)][memory key] = permutation image array over U_{j,k}.
    beta: BTreeMap<(usize, usize), LabelFamilies<Vec<usize>>>,
}

impl BasisChangeMap {
    pub fn families(&self, j: usize, k: usize) -> &LabelFamilies<Vec<usize>> {
        &self.beta[&(j, k)]
    }

    pub fn is_identity(&self) -> bool {
        self.beta.values().all(|fams| {
            fams.values()
                .all(|perm| perm.iter().enumerate().all(|(i, &v)| i == v))
        })
    }
}

/// Factors every branch in both bases and records, per cell and per
/// masked memory index, the label map u -> u'. A memory index that
/// demands two images for one label is the single-valuedness failure
/// surfaced as `Inconsistent`; completed maps are checked to be
/// permutations.
pub fn change_of_basis(
    sec: &TrellisSection,
    m: &ControllableMatrix,
    basis_a: &GeneratorBasis,
    basis_b: &GeneratorBasis,
) -> Result<BasisChangeMap, GeneratorError> {
    let ell = basis_a.ell();
    let mut beta: BTreeMap<(usize, usize), LabelFamilies<Vec<Option<usize>>>> = BTreeMap::new();
    for b in 0..sec.branch_count() {
        let la = factor_element(sec, m, basis_a, b)?;
        let lb = factor_element(sec, m, basis_b, b)?;
        for j in 0..=ell {
            for k in j..=ell {
                let key = la.memory_key(j, k);
                let entry = beta
                    .entry((j, k))
                    .or_default()
                    .entry(key)
                    .or_insert_with(|| vec![None; basis_a.size(k)]);
                let u = la.get(j, k);
                let v = lb.get(j, k);
                match entry[u] {
                    None => entry[u] = Some(v),
                    Some(prev) if prev == v => {}
                    Some(_) => return Err(GeneratorError::Inconsistent { j, k, u }),
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for ((j, k), fams) in beta {
        let mut done = BTreeMap::new();
        for (key, images) in fams {
            let perm: Vec<usize> = images
                .iter()
                .map(|o| o.expect("every label occurs under every realized memory index"))
                .collect();
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..perm.len()).collect::<Vec<_>>() {
                return Err(GeneratorError::Inconsistent { j, k, u: 0 });
            }
            done.insert(key, perm);
        }
        out.insert((j, k), done);
    }
    Ok(BasisChangeMap { beta: out })
}

/// Number of distinct component systems over all transversal choices:
/// the product over granule cosets of the number of distinct component
/// tuples the coset offers.
pub fn count_generator_bases(granules: &[Granule], cap: u64) -> Result<u64, GeneratorError> {
    let mut total: u64 = 1;
    for gran in granules {
        for coset in 1..gran.order() {
            let distinct: std::collections::BTreeSet<&Vec<usize>> = gran
                .coset(coset)
                .iter()
                .map(|&ix| &gran.full.paths()[ix])
                .collect();
            total = total.saturating_mul(distinct.len() as u64);
            if total > cap {
                return Err(GeneratorError::TooLarge { size: total, cap });
            }
        }
    }
    Ok(total)
}
