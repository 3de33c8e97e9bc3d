//! The time-domain encoder built on the generator components.
//!
//! The machine state is the bank node (u_1, .., u_ell): column j holds
//! the labels of the generators selected j epochs ago, each label
//! riding its register row unchanged as it shifts. The state branch is
//! the ordered product of the stored components; an input x in X_0
//! factors through the first matrix column into fresh labels, the
//! output is x times the state branch, and the window shifts by one.
//!
//! Two output orderings share this state: columns left to right
//! (each column bottom-up) and rows bottom-up (each row left to right).
//! For abelian branch groups the two agree everywhere; for nonabelian
//! ones the disagreements are the commutation restrictions the
//! components would have to satisfy.

use thiserror::Error;

use crate::generators::{factor_element, GeneratorBasis, GeneratorError};
use crate::group::FiniteGroup;
use crate::schreier::ControllableMatrix;
use crate::shiftbank::{NodeState, UMatrix};
use crate::trellis::{validate_path, TrellisSection};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncoderError {
    #[error("input branch {branch} is not in the splitting kernel")]
    InputNotInX0 { branch: usize },
    #[error("target is not a valid trellis path at epoch {epoch}")]
    InvalidPath { epoch: usize },
    #[error("label {label} out of range for window {k}")]
    LabelOutOfRange { k: usize, label: usize },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

/// The encoder state: stored label columns for offsets 1..=ell.
pub type EncoderState = NodeState;

/// An input, either as a branch of X_0 or as the fresh label column
/// (u_{0,0}, .., u_{0,ell}); the two forms interconvert uniquely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncoderInput {
    Branch(usize),
    Labels(Vec<usize>),
}

pub struct Encoder<'a> {
    sec: &'a TrellisSection,
    matrix: &'a ControllableMatrix,
    basis: &'a GeneratorBasis,
}

impl<'a> Encoder<'a> {
    pub fn new(
        sec: &'a TrellisSection,
        matrix: &'a ControllableMatrix,
        basis: &'a GeneratorBasis,
    ) -> Self {
        Encoder { sec, matrix, basis }
    }

    pub fn ell(&self) -> usize {
        self.basis.ell()
    }

    fn group(&self) -> &FiniteGroup {
        self.sec.group()
    }

    /// All stored labels zero; the state branch is the identity.
    pub fn initial_state(&self) -> EncoderState {
        NodeState::zero(self.ell())
    }

    /// Factors an input branch through the first matrix column (the
    /// nested kernel-intersection chain) into fresh labels.
    pub fn input_labels(&self, x: usize) -> Result<Vec<usize>, EncoderError> {
        let ell = self.ell();
        if !self.matrix.cell(0, ell).contains(x) {
            return Err(EncoderError::InputNotInX0 { branch: x });
        }
        let g = self.group();
        let mut labels = vec![0; ell + 1];
        let mut cur = x;
        for k in (0..=ell).rev() {
            let below = self.matrix.cell_below(0, k);
            let u = (0..self.basis.size(k))
                .find(|&u| below.contains(g.op(cur, g.inv(self.basis.component(0, k, u)))))
                .ok_or(GeneratorError::NotATransversal { j: 0, k })?;
            labels[k] = u;
            cur = g.op(cur, g.inv(self.basis.component(0, k, u)));
        }
        debug_assert_eq!(cur, 0);
        Ok(labels)
    }

    /// The branch a fresh label column denotes: the ordered product of
    /// the first-column components.
    pub fn input_branch(&self, labels: &[usize]) -> Result<usize, EncoderError> {
        assert_eq!(labels.len(), self.ell() + 1);
        for (k, &u) in labels.iter().enumerate() {
            if u >= self.basis.size(k) {
                return Err(EncoderError::LabelOutOfRange { k, label: u });
            }
        }
        Ok(self
            .group()
            .product((0..=self.ell()).map(|k| self.basis.component(0, k, labels[k]))))
    }

    fn resolve_input(&self, input: &EncoderInput) -> Result<(usize, Vec<usize>), EncoderError> {
        match input {
            EncoderInput::Branch(x) => Ok((*x, self.input_labels(*x)?)),
            EncoderInput::Labels(l) => {
                let x = self.input_branch(l)?;
                Ok((x, l.clone()))
            }
        }
    }

    /// The branch the state contributes: columns 1..=ell, each bottom
    /// row up.
    pub fn state_branch(&self, state: &EncoderState) -> usize {
        let ell = self.ell();
        let mut acc = 0;
        for j in 1..=ell {
            for k in j..=ell {
                acc = self
                    .group()
                    .op(acc, self.basis.component(j, k, state.get(j, k)));
            }
        }
        acc
    }

    /// One step of the column-row machine: output x * state branch,
    /// then shift the window and install the fresh labels.
    pub fn step(
        &self,
        state: &EncoderState,
        input: &EncoderInput,
    ) -> Result<(usize, EncoderState), EncoderError> {
        let (x, labels) = self.resolve_input(input)?;
        if !self.matrix.cell(0, self.ell()).contains(x) {
            return Err(EncoderError::InputNotInX0 { branch: x });
        }
        let out = self.group().op(x, self.state_branch(state));
        Ok((out, state.advance(&labels)))
    }

    /// One step of the row-column machine: same state and shift, output
    /// composed row by row (each row left to right).
    pub fn step_row_column(
        &self,
        state: &EncoderState,
        input: &EncoderInput,
    ) -> Result<(usize, EncoderState), EncoderError> {
        let (_, labels) = self.resolve_input(input)?;
        let ell = self.ell();
        let mut acc = 0;
        for k in 0..=ell {
            for j in 0..=k {
                let u = if j == 0 { labels[k] } else { state.get(j, k) };
                acc = self.group().op(acc, self.basis.component(j, k, u));
            }
        }
        Ok((acc, state.advance(&labels)))
    }

    /// Feeds the single generator (k, u) at the identity state followed
    /// by identity inputs; the first k+1 outputs are returned and equal
    /// the generator path.
    pub fn impulse_response(&self, k: usize, u: usize) -> Vec<usize> {
        let mut labels = vec![0; self.ell() + 1];
        labels[k] = u;
        let mut state = self.initial_state();
        let mut out = Vec::with_capacity(k + 1);
        for t in 0..=k {
            let input = if t == 0 {
                EncoderInput::Labels(labels.clone())
            } else {
                EncoderInput::Branch(0)
            };
            let (b, next) = self
                .step(&state, &input)
                .expect("generator inputs are valid");
            out.push(b);
            state = next;
        }
        out
    }

    /// The full label array of a branch, split into the state part
    /// (columns 1..) and the fresh-input part (column 0).
    fn split_factorization(&self, b: usize) -> Result<(EncoderState, Vec<usize>), EncoderError> {
        let labels: UMatrix = factor_element(self.sec, self.matrix, self.basis, b)?;
        let ell = self.ell();
        let mut state = NodeState::zero(ell);
        for j in 1..=ell {
            for k in j..=ell {
                state.set(j, k, labels.get(j, k));
            }
        }
        let col0 = (0..=ell).map(|k| labels.get(0, k)).collect();
        Ok((state, col0))
    }

    /// Drives the encoder along an arbitrary valid path: the first
    /// branch fixes the initial state and input through its unique
    /// factorization, and each later epoch needs exactly the input
    /// that corrects the free-running state branch.
    pub fn track(&self, path: &[usize]) -> Result<Track, EncoderError> {
        assert!(!path.is_empty());
        if let Err(epoch) = validate_path(self.sec, path) {
            return Err(EncoderError::InvalidPath { epoch });
        }
        let g = self.group();
        let (initial_state, col0) = self.split_factorization(path[0])?;
        let mut inputs = vec![self.input_branch(&col0)?];
        let mut state = initial_state.clone();
        state = state.advance(&col0);
        for (t, &target) in path.iter().enumerate().skip(1) {
            let x = g.op(target, g.inv(self.state_branch(&state)));
            if !self.matrix.cell(0, self.ell()).contains(x) {
                return Err(EncoderError::InvalidPath { epoch: t });
            }
            inputs.push(x);
            let labels = self.input_labels(x)?;
            state = state.advance(&labels);
        }
        Ok(Track {
            initial_state,
            inputs,
        })
    }

    /// Replays an input sequence from a given state.
    pub fn run(&self, state: &EncoderState, inputs: &[usize]) -> Result<Vec<usize>, EncoderError> {
        let mut s = state.clone();
        let mut out = Vec::with_capacity(inputs.len());
        for &x in inputs {
            let (b, next) = self.step(&s, &EncoderInput::Branch(x))?;
            out.push(b);
            s = next;
        }
        Ok(out)
    }

    /// All states reachable from the identity state.
    pub fn reachable_states(&self) -> Vec<EncoderState> {
        let x0 = self.matrix.cell(0, self.ell()).elements().to_vec();
        let mut seen = std::collections::BTreeSet::new();
        let mut queue = vec![self.initial_state()];
        seen.insert(self.initial_state());
        while let Some(s) = queue.pop() {
            for &x in &x0 {
                let (_, next) = self.step(&s, &EncoderInput::Branch(x)).unwrap();
                if seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Result of tracking: the state the machine must start in and the
/// input branch per epoch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Track {
    pub initial_state: EncoderState,
    pub inputs: Vec<usize>,
}

/// Outcome of comparing the two product orderings over every label
/// array: either they agree everywhere, or the arrays where they differ
/// (the commutation restrictions a nonabelian branch group must clear).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualityOutcome {
    Equal,
    Restrictions(Vec<(UMatrix, usize, usize)>),
}

/// Compares column-row and row-column products for arbitrary component
/// tables; total on any group, never a failure.
pub fn compare_orderings(
    group: &FiniteGroup,
    ell: usize,
    sizes: &[usize],
    component: &dyn Fn(usize, usize, usize) -> usize,
) -> DualityOutcome {
    let mut arrays = vec![UMatrix::zero(ell)];
    for j in 0..=ell {
        for k in j..=ell {
            let mut next = Vec::with_capacity(arrays.len() * sizes[k]);
            for m in &arrays {
                for u in 0..sizes[k] {
                    let mut m2 = m.clone();
                    m2.set(j, k, u);
                    next.push(m2);
                }
            }
            arrays = next;
        }
    }
    let mut bad = Vec::new();
    for m in arrays {
        let mut col_row = 0;
        for j in 0..=ell {
            for k in j..=ell {
                col_row = group.op(col_row, component(j, k, m.get(j, k)));
            }
        }
        let mut row_col = 0;
        for k in 0..=ell {
            for j in 0..=k {
                row_col = group.op(row_col, component(j, k, m.get(j, k)));
            }
        }
        if col_row != row_col {
            bad.push((m, col_row, row_col));
        }
    }
    if bad.is_empty() {
        DualityOutcome::Equal
    } else {
        DualityOutcome::Restrictions(bad)
    }
}

/// The two orderings over every label array of a basis.
pub fn verify_duality(sec: &TrellisSection, basis: &GeneratorBasis) -> DualityOutcome {
    let sizes = basis.sizes();
    compare_orderings(sec.group(), basis.ell(), &sizes, &|j, k, u| {
        basis.component(j, k, u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generators::{code_segment, extract_generators, granule};
    use crate::group::Chooser;
    use crate::schreier::controllable_matrix;
    use crate::trellis::{compute_chains, segment_paths_from, TrellisSection};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    struct Ctx {
        sec: TrellisSection,
        matrix: ControllableMatrix,
        basis: GeneratorBasis,
    }

    fn ctx(sec: TrellisSection) -> Ctx {
        let chains = compute_chains(&sec).unwrap();
        let matrix = controllable_matrix(&sec, &chains).unwrap();
        let granules: Vec<_> = (0..=chains.ell())
            .map(|k| granule(&sec, &code_segment(&sec, &chains, k).unwrap()).unwrap())
            .collect();
        let basis = extract_generators(&chains, &granules, Chooser::Lex).unwrap();
        Ctx { sec, matrix, basis }
    }

    fn all_fixtures() -> Vec<Ctx> {
        vec![
            ctx(fixtures::fix_a()),
            ctx(fixtures::fix_b()),
            ctx(fixtures::fix_c()),
            ctx(fixtures::fix_e()),
        ]
    }

    fn random_path(sec: &TrellisSection, rng: &mut StdRng, len: usize) -> Vec<usize> {
        let mut path = vec![rng.gen_range(0..sec.branch_count())];
        for _ in 1..len {
            let succ = sec.next_branch_set(*path.last().unwrap());
            path.push(succ[rng.gen_range(0..succ.len())]);
        }
        path
    }

    #[test]
    fn initial_state_is_identity() {
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            assert_eq!(enc.state_branch(&enc.initial_state()), 0);
        }
    }

    #[test]
    fn fix_b_step_examples() {
        let c = ctx(fixtures::fix_b());
        let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
        let s0 = enc.initial_state();
        let (out, s1) = enc.step(&s0, &EncoderInput::Branch(1)).unwrap();
        assert_eq!(out, 1);
        let (out, _) = enc.step(&s1, &EncoderInput::Branch(0)).unwrap();
        assert_eq!(out, 2);
        let (out, _) = enc.step(&s0, &EncoderInput::Branch(0)).unwrap();
        assert_eq!(out, 0);
    }

    #[test]
    fn rejects_input_outside_kernel() {
        let c = ctx(fixtures::fix_b());
        let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
        let err = enc
            .step(&enc.initial_state(), &EncoderInput::Branch(2))
            .unwrap_err();
        assert_eq!(err, EncoderError::InputNotInX0 { branch: 2 });
    }

    #[test]
    fn input_forms_interconvert() {
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            for &x in c.matrix.cell(0, enc.ell()).elements() {
                let labels = enc.input_labels(x).unwrap();
                assert_eq!(enc.input_branch(&labels).unwrap(), x);
            }
        }
    }

    #[test]
    fn impulse_responses_equal_generators() {
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            for k in 0..=enc.ell() {
                for u in 0..c.basis.size(k) {
                    assert_eq!(enc.impulse_response(k, u), c.basis.generator(k, u));
                }
            }
        }
    }

    #[test]
    fn impulse_tail_returns_to_identity() {
        let c = ctx(fixtures::fix_c());
        let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
        let mut state = enc.initial_state();
        let mut labels = vec![0; enc.ell() + 1];
        labels[2] = 1;
        let mut outs = Vec::new();
        for t in 0..6 {
            let input = if t == 0 {
                EncoderInput::Labels(labels.clone())
            } else {
                EncoderInput::Branch(0)
            };
            let (b, next) = enc.step(&state, &input).unwrap();
            outs.push(b);
            state = next;
        }
        assert_eq!(outs, vec![1, 4, 2, 0, 0, 0]);
    }

    #[test]
    fn track_examples() {
        let c = ctx(fixtures::fix_b());
        let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
        let track = enc.track(&[1, 2]).unwrap();
        assert_eq!(track.inputs, vec![1, 0]);
        assert_eq!(track.initial_state, enc.initial_state());
        let track = enc.track(&[0, 0, 0]).unwrap();
        assert_eq!(track.inputs, vec![0, 0, 0]);
    }

    #[test]
    fn track_rejects_state_mismatch() {
        let c = ctx(fixtures::fix_b());
        let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
        // Branch 1 ends in state 1 but also starts in state 0.
        let err = enc.track(&[1, 1]).unwrap_err();
        assert_eq!(err, EncoderError::InvalidPath { epoch: 1 });
    }

    #[test]
    fn track_then_run_reproduces_random_paths() {
        let mut rng = StdRng::seed_from_u64(7);
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            for _ in 0..50 {
                let path = random_path(&c.sec, &mut rng, 20);
                let track = enc.track(&path).unwrap();
                let replay = enc.run(&track.initial_state, &track.inputs).unwrap();
                assert_eq!(replay, path);
            }
        }
    }

    #[test]
    fn run_then_track_recovers_inputs() {
        let mut rng = StdRng::seed_from_u64(77);
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            let x0 = c.matrix.cell(0, enc.ell()).elements().to_vec();
            for _ in 0..50 {
                let inputs: Vec<usize> = (0..20).map(|_| x0[rng.gen_range(0..x0.len())]).collect();
                let path = enc.run(&enc.initial_state(), &inputs).unwrap();
                let track = enc.track(&path).unwrap();
                assert_eq!(track.initial_state, enc.initial_state());
                assert_eq!(track.inputs, inputs);
            }
        }
    }

    #[test]
    fn reachable_states_count_the_state_group() {
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            assert_eq!(enc.reachable_states().len(), c.sec.sigma().order());
        }
    }

    #[test]
    fn state_branches_hit_each_kernel_coset_once() {
        for c in all_fixtures() {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            let x0 = c.matrix.cell(0, enc.ell());
            let mut cosets = std::collections::BTreeSet::new();
            let states = enc.reachable_states();
            for s in &states {
                let b = enc.state_branch(s);
                let coset = crate::group::complex_product(c.sec.group(), x0.elements(), &[b]);
                cosets.insert(coset);
            }
            assert_eq!(cosets.len(), states.len());
            assert_eq!(cosets.len(), c.sec.group().order() / x0.order());
        }
    }

    #[test]
    fn outputs_depend_only_on_a_bounded_window() {
        // Two input histories agreeing on the last ell+1 epochs give
        // the same final output; exhaustive over short histories.
        for c in [ctx(fixtures::fix_b()), ctx(fixtures::fix_c())] {
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            let ell = enc.ell();
            let x0 = c.matrix.cell(0, ell).elements().to_vec();
            let mut tails = vec![Vec::new()];
            for _ in 0..=ell {
                let mut next = Vec::new();
                for t in &tails {
                    for &x in &x0 {
                        let mut t2 = t.clone();
                        t2.push(x);
                        next.push(t2);
                    }
                }
                tails = next;
            }
            for tail in &tails {
                let mut finals = std::collections::BTreeSet::new();
                for &prefix in &x0 {
                    let mut inputs = vec![prefix];
                    inputs.extend_from_slice(tail);
                    let outs = enc.run(&enc.initial_state(), &inputs).unwrap();
                    finals.insert(*outs.last().unwrap());
                }
                assert_eq!(finals.len(), 1, "output at the window end is prefix-free");
            }
        }
    }

    #[test]
    fn estimation_degrades_by_one_chain_level_per_epoch() {
        // Paths sharing a start branch stay in the same coset of
        // X_{j-1} at offset j; exhaustive on fix_b, sampled on fix_c.
        let check = |sec: &TrellisSection, pairs: Vec<(Vec<usize>, Vec<usize>)>| {
            let chains = compute_chains(sec).unwrap();
            for (p, q) in pairs {
                assert_eq!(p[0], q[0]);
                for j in 1..p.len() {
                    let x = chains.x(j as isize - 1);
                    let diff = sec.group().op(p[j], sec.group().inv(q[j]));
                    assert!(x.contains(diff), "offset {j} stays within X_{}", j - 1);
                }
            }
        };
        let sec = fixtures::fix_b();
        let mut pairs = Vec::new();
        for b0 in 0..sec.branch_count() {
            let all = segment_paths_from(&sec, &[b0], 1);
            for p in all.paths() {
                for q in all.paths() {
                    pairs.push((p.clone(), q.clone()));
                }
            }
        }
        check(&sec, pairs);

        let sec = fixtures::fix_c();
        let mut rng = StdRng::seed_from_u64(3);
        let mut pairs = Vec::new();
        for _ in 0..100 {
            let b0 = rng.gen_range(0..sec.branch_count());
            let mut p = random_path(&sec, &mut rng, 3);
            let mut q = random_path(&sec, &mut rng, 3);
            p[0] = b0;
            q[0] = b0;
            // Regenerate suffixes so the paths stay valid.
            for t in 1..3 {
                let sp = sec.next_branch_set(p[t - 1]);
                p[t] = sp[rng.gen_range(0..sp.len())];
                let sq = sec.next_branch_set(q[t - 1]);
                q[t] = sq[rng.gen_range(0..sq.len())];
            }
            pairs.push((p, q));
        }
        check(&sec, pairs);
    }

    #[test]
    fn row_column_agrees_on_abelian_fixtures() {
        for c in all_fixtures() {
            assert!(c.sec.group().is_abelian());
            let enc = Encoder::new(&c.sec, &c.matrix, &c.basis);
            let x0 = c.matrix.cell(0, enc.ell()).elements().to_vec();
            let mut histories = vec![Vec::new()];
            for _ in 0..4 {
                let mut next = Vec::new();
                for h in &histories {
                    for &x in &x0 {
                        let mut h2 = h.clone();
                        h2.push(x);
                        next.push(h2);
                    }
                }
                histories = next;
                for h in &histories {
                    let mut s1 = enc.initial_state();
                    let mut s2 = enc.initial_state();
                    for &x in h {
                        let (b1, n1) = enc.step(&s1, &EncoderInput::Branch(x)).unwrap();
                        let (b2, n2) = enc.step_row_column(&s2, &EncoderInput::Branch(x)).unwrap();
                        assert_eq!(b1, b2);
                        s1 = n1;
                        s2 = n2;
                    }
                }
                if histories.len() > 400 {
                    break;
                }
            }
        }
    }

    #[test]
    fn duality_on_fixture_bases() {
        for c in all_fixtures() {
            assert_eq!(verify_duality(&c.sec, &c.basis), DualityOutcome::Equal);
        }
    }

    #[test]
    fn orderings_coincide_syntactically_at_depth_one() {
        // At ell = 1 the two orderings are the same word, so even a
        // nonabelian table compares equal.
        let s3 = FiniteGroup::symmetric(3);
        let comp = |j: usize, k: usize, u: usize| -> usize {
            match (j, k, u) {
                (0, 0, u) => [0, 3, 4][u],
                (0, 1, u) => [0, 1][u],
                (1, 1, u) => [0, 2][u],
                _ => unreachable!(),
            }
        };
        assert_eq!(
            compare_orderings(&s3, 1, &[3, 2], &comp),
            DualityOutcome::Equal
        );
    }

    #[test]
    fn ordering_comparison_is_total_on_nonabelian_cells() {
        // Synthetic depth-2 table over S3: the words differ by moving
        // the (0,2) component past the (1,1) one, so a transposition
        // against a 3-cycle must show up as a reported restriction.
        let s3 = FiniteGroup::symmetric(3);
        let comp = |j: usize, k: usize, u: usize| -> usize {
            match (j, k, u) {
                (0, 0, _) => 0,
                (0, 1, u) | (1, 2, u) | (2, 2, u) => [0, 0][u],
                (1, 1, u) => [0, 1][u],
                (0, 2, u) => [0, 3][u],
                _ => unreachable!(),
            }
        };
        match compare_orderings(&s3, 2, &[1, 2, 2], &comp) {
            DualityOutcome::Restrictions(bad) => {
                assert!(!bad.is_empty());
                for (m, col_row, row_col) in &bad {
                    assert_ne!(col_row, row_col);
                    assert_eq!((m.get(1, 1), m.get(0, 2)), (1, 1));
                }
            }
            DualityOutcome::Equal => panic!("transpositions past a 3-cycle must not commute"),
        }
    }
}
