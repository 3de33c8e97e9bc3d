//! The refinement of the splitting chain {X_j} by the merging chain
//! {Y_i}: a matrix of subgroups X_{j-1}(X_j meet Y_i) that reads as a
//! normal chain of B. Under controllability the matrix collapses to a
//! triangular form whose cell orders, quotients and shift behaviour
//! drive everything downstream (generators, encoder, register bank).
//!
//! Indexing follows one convention throughout: triangular cell (j, k)
//! with 0 <= j <= k <= ell is X_{j-1}(X_j meet Y_{k-j}) - column j, row
//! k counted from the bottom, so row k has k+1 cells. cell(j, j-1)
//! degenerates to X_{j-1}, which keeps quotient formulas uniform.

use thiserror::Error;

use crate::group::{
    are_isomorphic, complex_product, is_normal, quotient_within, FiniteGroup, GroupError,
    InnerQuotient, Subgroup,
};
use crate::trellis::{
    iterate_next, path_group, segment_paths_from, Chains, PathSet, TrellisError, TrellisSection,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchreierError {
    #[error("diagonal identity fails in column {j}: X_{{j-1}}(X_j meet Y_{{ell-j}}) != X_j")]
    DiagonalIdentityFailed { j: usize },
    #[error("shift property fails at cell ({j}, {k})")]
    ShiftPropertyFailed { j: usize, k: usize },
    #[error("rectangle isomorphism fails at row {k}, column {j}")]
    RectangleFailed { j: usize, k: usize },
    #[error("Zassenhaus-form isomorphism fails at cell ({j}, {k})")]
    ZassenhausFailed { j: usize, k: usize },
    #[error("quotient orders differ along row {k}")]
    RowOrderMismatch { k: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Trellis(#[from] TrellisError),
}

/// The full rectangular layout: column j, rows i = -1..=ell, with
/// entry X_{j-1}(X_j meet Y_i).
#[derive(Clone, Debug)]
pub struct SchreierMatrix {
    ell: usize,
    cols: Vec<Vec<Subgroup>>,
}

impl SchreierMatrix {
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Entry in column j at Y-row i (i ranges over -1..=ell).
    pub fn entry(&self, j: usize, i: isize) -> &Subgroup {
        &self.cols[j][(i + 1) as usize]
    }
}

/// Builds the rectangular matrix and checks the refinement reading:
/// bottom row X_{-1}..X_{ell-1}, top row X_0..X_ell, and column-major
/// traversal an ascending chain of normal subgroups of B.
pub fn schreier_matrix(sec: &TrellisSection, chains: &Chains) -> SchreierMatrix {
    let ell = chains.ell();
    let b = sec.group();
    let mut cols = Vec::with_capacity(ell + 1);
    for j in 0..=ell {
        let mut col = Vec::with_capacity(ell + 2);
        for i in -1..=(ell as isize) {
            let meet: Vec<usize> = chains
                .x(j as isize)
                .elements()
                .iter()
                .copied()
                .filter(|&e| chains.y(i).contains(e))
                .collect();
            let cell = complex_product(b, chains.x(j as isize - 1).elements(), &meet);
            col.push(Subgroup::new(b, cell).expect("matrix cell is a subgroup"));
        }
        cols.push(col);
    }
    let m = SchreierMatrix { ell, cols };
    for j in 0..=ell {
        assert_eq!(m.entry(j, -1), chains.x(j as isize - 1), "bottom row");
        assert_eq!(m.entry(j, ell as isize), chains.x(j as isize), "top row");
        for i in -1..(ell as isize) {
            assert!(
                m.entry(j, i)
                    .elements()
                    .iter()
                    .all(|&e| m.entry(j, i + 1).contains(e)),
                "columns ascend"
            );
        }
        for i in -1..=(ell as isize) {
            assert!(is_normal(b, m.entry(j, i)), "cells are normal in B");
        }
    }
    m
}

/// The triangular layout valid under controllability.
#[derive(Clone, Debug)]
pub struct ControllableMatrix {
    ell: usize,
    x_below: Vec<Subgroup>,
    cells: Vec<Vec<Subgroup>>,
}

impl ControllableMatrix {
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// cell(j, k) = X_{j-1}(X_j meet Y_{k-j}) for 0 <= j <= k <= ell.
    pub fn cell(&self, j: usize, k: usize) -> &Subgroup {
        &self.cells[j][k - j]
    }

    /// The entry one row down in the same column; for k = j this
    /// degenerates to X_{j-1}.
    pub fn cell_below(&self, j: usize, k: usize) -> &Subgroup {
        if k == j {
            &self.x_below[j]
        } else {
            self.cell(j, k - 1)
        }
    }

    /// X_{j-1}, the degenerate cell a column bottoms out on; as
    /// column_base(k+1) it is also where the shift map sends the
    /// diagonal cell (k, k).
    pub fn column_base(&self, j: usize) -> &Subgroup {
        &self.x_below[j]
    }

    /// Cells in the order that reads as an ascending normal chain of B:
    /// column 0 bottom to top, then column 1, and so on.
    pub fn chain_order(&self) -> Vec<(usize, usize)> {
        let mut order = Vec::new();
        for j in 0..=self.ell {
            for k in j..=self.ell {
                order.push((j, k));
            }
        }
        order
    }

    /// Copy with one cell replaced; for negative tests.
    pub fn with_cell(&self, j: usize, k: usize, sub: Subgroup) -> ControllableMatrix {
        let mut out = self.clone();
        out.cells[j][k - j] = sub;
        out
    }
}

/// Builds the triangular matrix, asserting the diagonal identity
/// X_{j-1}(X_j meet Y_{ell-j}) = X_j that controllability promises.
pub fn controllable_matrix(
    sec: &TrellisSection,
    chains: &Chains,
) -> Result<ControllableMatrix, SchreierError> {
    let ell = chains.ell();
    let b = sec.group();
    let mut cells = Vec::with_capacity(ell + 1);
    let mut x_below = Vec::with_capacity(ell + 2);
    for j in 0..=ell {
        x_below.push(chains.x(j as isize - 1).clone());
        let mut col = Vec::new();
        for k in j..=ell {
            let meet: Vec<usize> = chains
                .x(j as isize)
                .elements()
                .iter()
                .copied()
                .filter(|&e| chains.y((k - j) as isize).contains(e))
                .collect();
            let cell = complex_product(b, chains.x(j as isize - 1).elements(), &meet);
            col.push(Subgroup::new(b, cell)?);
        }
        cells.push(col);
    }
    x_below.push(chains.x(ell as isize).clone());
    let m = ControllableMatrix {
        ell,
        x_below,
        cells,
    };
    for j in 0..=ell {
        if m.cell(j, ell) != chains.x(j as isize) {
            return Err(SchreierError::DiagonalIdentityFailed { j });
        }
    }
    Ok(m)
}

/// The shift property: N applied to cell(j, k) lands exactly on the
/// next cell in the same row, with cell(k+1, k) read as X_k.
pub fn verify_shift_property(
    sec: &TrellisSection,
    m: &ControllableMatrix,
) -> Result<(), SchreierError> {
    for k in 0..=m.ell() {
        for j in 0..=k {
            let shifted = sec.next_of_set(m.cell(j, k).elements());
            let target: &[usize] = if j == k {
                m.column_base(j + 1).elements()
            } else {
                m.cell(j + 1, k).elements()
            };
            if shifted != target {
                return Err(SchreierError::ShiftPropertyFailed { j, k });
            }
        }
    }
    Ok(())
}

/// The first column of the triangular matrix and its time reversal:
/// delta_k = X_0 meet Y_k and delta'_k = Y_0 meet X_k, for k = -1..=ell.
#[derive(Clone, Debug)]
pub struct DeltaChain {
    deltas: Vec<Subgroup>,
    reversed: Vec<Subgroup>,
}

impl DeltaChain {
    pub fn delta(&self, k: isize) -> &Subgroup {
        &self.deltas[(k + 1) as usize]
    }

    pub fn delta_rev(&self, k: isize) -> &Subgroup {
        &self.reversed[(k + 1) as usize]
    }

    pub fn orders(&self) -> Vec<usize> {
        self.deltas.iter().map(|s| s.order()).collect()
    }
}

pub fn delta_chain(sec: &TrellisSection, chains: &Chains) -> DeltaChain {
    let b = sec.group();
    let build = |first: &Subgroup, other: fn(&Chains, isize) -> &Subgroup| -> Vec<Subgroup> {
        (-1..=(chains.ell() as isize))
            .map(|k| {
                let meet: Vec<usize> = first
                    .elements()
                    .iter()
                    .copied()
                    .filter(|&e| other(chains, k).contains(e))
                    .collect();
                Subgroup::new(b, meet).expect("intersection of subgroups")
            })
            .collect()
    };
    DeltaChain {
        deltas: build(&sec.splitting_kernel(), |c, k| c.y(k)),
        reversed: build(&sec.merging_kernel(), |c, k| c.x(k)),
    }
}

/// Whether a row's pairwise isomorphisms were checked exactly or, past
/// the order cap, by order only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoCheck {
    Exact,
    OrderOnly,
}

/// The quotient Q_{j,k} of vertically adjacent cells, one per cell of
/// the triangular matrix.
pub struct CellQuotient {
    pub j: usize,
    pub k: usize,
    inner: InnerQuotient,
}

impl CellQuotient {
    pub fn order(&self) -> usize {
        self.inner.order()
    }

    pub fn group(&self) -> &FiniteGroup {
        self.inner.quotient.group()
    }

    /// Coset label of a branch, if the branch lies in cell(j, k).
    pub fn label_of(&self, branch: usize) -> Option<usize> {
        self.inner.label_of(branch)
    }
}

pub struct QuotientCells {
    ell: usize,
    cells: Vec<Vec<CellQuotient>>,
    row_checks: Vec<IsoCheck>,
}

impl QuotientCells {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn q(&self, j: usize, k: usize) -> &CellQuotient {
        &self.cells[k][j]
    }

    pub fn row_check(&self, k: usize) -> IsoCheck {
        self.row_checks[k]
    }

    /// Orders |Q_{j,k}| laid out row-major.
    pub fn order_rows(&self) -> Vec<Vec<usize>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c.order()).collect())
            .collect()
    }
}

/// Builds every Q_{j,k} = cell(j,k)/cell(j,k-1) and verifies that the
/// quotients along each row agree in order and (up to the cap) in
/// isomorphism type.
pub fn quotient_cells(
    sec: &TrellisSection,
    m: &ControllableMatrix,
) -> Result<QuotientCells, SchreierError> {
    let ell = m.ell();
    let mut cells: Vec<Vec<CellQuotient>> = Vec::with_capacity(ell + 1);
    let mut row_checks = Vec::with_capacity(ell + 1);
    for k in 0..=ell {
        let mut row = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let big = m.cell(j, k);
            let small = m.cell_below(j, k);
            let inner = quotient_within(sec.group(), big, small)?;
            row.push(CellQuotient { j, k, inner });
        }
        if row.iter().any(|c| c.order() != row[0].order()) {
            return Err(SchreierError::RowOrderMismatch { k });
        }
        let mut check = IsoCheck::Exact;
        for j in 1..=k {
            match are_isomorphic(row[0].group(), row[j].group()) {
                Ok(true) => {}
                Ok(false) => return Err(SchreierError::RectangleFailed { j, k }),
                Err(GroupError::TooLarge { .. }) => check = IsoCheck::OrderOnly,
                Err(e) => return Err(e.into()),
            }
        }
        row_checks.push(check);
        cells.push(row);
    }
    Ok(QuotientCells {
        ell,
        cells,
        row_checks,
    })
}

/// Two routes to the same row: iterating N on delta_k must land on the
/// closed-form cell X_{j-1}(X_j meet Y_{k-j}).
pub fn verify_row_shift_routes(
    sec: &TrellisSection,
    m: &ControllableMatrix,
    delta: &DeltaChain,
) -> Result<(), SchreierError> {
    for k in 0..=m.ell() {
        for j in 0..=k {
            let iterated = iterate_next(sec, delta.delta(k as isize).elements(), j);
            if iterated != m.cell(j, k).elements() {
                return Err(SchreierError::ShiftPropertyFailed { j, k });
            }
        }
    }
    Ok(())
}

/// The quotient of window path groups N^{[0,k]}(delta_k) over
/// N^{[0,k]}(delta_{k-1}), realized as a concrete group, plus the path
/// sets themselves.
pub struct WindowQuotient {
    pub big: PathSet,
    pub small: PathSet,
    pub inner: InnerQuotient,
}

pub fn window_quotient(
    sec: &TrellisSection,
    delta: &DeltaChain,
    k: usize,
) -> Result<WindowQuotient, SchreierError> {
    let big = segment_paths_from(sec, delta.delta(k as isize).elements(), k);
    let small = segment_paths_from(sec, delta.delta(k as isize - 1).elements(), k);
    let pg = path_group(sec, &big)?;
    let small_ix: Vec<usize> = small
        .paths()
        .iter()
        .map(|p| big.index_of(p).expect("smaller window paths embed"))
        .collect();
    let whole = Subgroup::whole(&pg);
    let small_sub = Subgroup::new(&pg, small_ix)?;
    let inner = quotient_within(&pg, &whole, &small_sub)?;
    Ok(WindowQuotient { big, small, inner })
}

/// The rectangle criterion: for every k and every j <= k, the three
/// quotients delta_k/delta_{k-1}, the window quotient on paths, and
/// Q_{j,k} are pairwise isomorphic.
pub fn verify_rectangle(
    sec: &TrellisSection,
    delta: &DeltaChain,
    cells: &QuotientCells,
) -> Result<(), SchreierError> {
    for k in 0..=cells.ell() {
        let dq = quotient_within(
            sec.group(),
            delta.delta(k as isize),
            delta.delta(k as isize - 1),
        )?;
        let wq = window_quotient(sec, delta, k)?;
        if !are_isomorphic(dq.quotient.group(), wq.inner.quotient.group())? {
            return Err(SchreierError::RectangleFailed { j: 0, k });
        }
        for j in 0..=k {
            let q = cells.q(j, k);
            if !are_isomorphic(wq.inner.quotient.group(), q.group())?
                || !are_isomorphic(dq.quotient.group(), q.group())?
            {
                return Err(SchreierError::RectangleFailed { j, k });
            }
        }
    }
    Ok(())
}

/// Q_{j,k} is also the section (X_j meet Y_{k-j}) over the product
/// (X_j meet Y_{k-j-1})(X_{j-1} meet Y_{k-j}).
pub fn verify_zassenhaus_form(
    sec: &TrellisSection,
    chains: &Chains,
    cells: &QuotientCells,
) -> Result<(), SchreierError> {
    let b = sec.group();
    let meet = |g: &Subgroup, h: &Subgroup| -> Vec<usize> {
        g.elements()
            .iter()
            .copied()
            .filter(|&e| h.contains(e))
            .collect()
    };
    for k in 0..=cells.ell() {
        for j in 0..=k {
            let ji = j as isize;
            let ki = k as isize;
            let top = Subgroup::new(b, meet(chains.x(ji), chains.y(ki - ji)))?;
            let d1 = meet(chains.x(ji), chains.y(ki - ji - 1));
            let d2 = meet(chains.x(ji - 1), chains.y(ki - ji));
            let bottom = Subgroup::new(b, complex_product(b, &d1, &d2))?;
            let zq = quotient_within(b, &top, &bottom)?;
            if !are_isomorphic(zq.quotient.group(), cells.q(j, k).group())? {
                return Err(SchreierError::ZassenhausFailed { j, k });
            }
        }
    }
    Ok(())
}

/// Reading the triangular cells column by column yields an ascending
/// chain of subgroups, each normal in B, from the trivial group to B.
pub fn verify_matrix_chain(sec: &TrellisSection, m: &ControllableMatrix) -> bool {
    let b = sec.group();
    let mut prev = Subgroup::trivial();
    for (j, k) in m.chain_order() {
        let cur = m.cell(j, k);
        if !prev.elements().iter().all(|&e| cur.contains(e)) || !is_normal(b, cur) {
            return false;
        }
        prev = cur.clone();
    }
    prev.order() == b.order()
}
