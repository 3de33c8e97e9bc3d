//! Fixed-layout text rendering of the matrices and derived structure.
//! Orderings are deterministic so identical inputs give byte-identical
//! reports.

use std::fmt::Write;

use crate::generators::GeneratorBasis;
use crate::schreier::{ControllableMatrix, QuotientCells, SchreierMatrix};
use crate::trellis::TrellisSection;

fn grid(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{:>width$}", cell, width = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Cell orders of the rectangular refinement matrix, top row first.
pub fn render_schreier(m: &SchreierMatrix) -> String {
    let ell = m.ell() as isize;
    let mut rows = Vec::new();
    let mut header = vec!["row\\col".to_string()];
    for j in 0..=ell {
        header.push(format!("j={j}"));
    }
    rows.push(header);
    for i in (-1..=ell).rev() {
        let mut row = vec![format!("i={i}")];
        for j in 0..=ell {
            row.push(m.entry(j as usize, i).order().to_string());
        }
        rows.push(row);
    }
    grid(&rows)
}

/// Cell orders of the triangular matrix, top row first; row k has k+1
/// cells.
pub fn render_controllable(m: &ControllableMatrix) -> String {
    let ell = m.ell();
    let mut rows = Vec::new();
    let mut header = vec!["row\\col".to_string()];
    for j in 0..=ell {
        header.push(format!("j={j}"));
    }
    rows.push(header);
    for k in (0..=ell).rev() {
        let mut row = vec![format!("k={k}")];
        for j in 0..=k {
            row.push(m.cell(j, k).order().to_string());
        }
        rows.push(row);
    }
    grid(&rows)
}

/// Orders of the quotient cells in the same triangular layout.
pub fn render_quotient_cells(cells: &QuotientCells) -> String {
    let ell = cells.ell();
    let mut rows = Vec::new();
    let mut header = vec!["row\\col".to_string()];
    for j in 0..=ell {
        header.push(format!("j={j}"));
    }
    rows.push(header);
    for k in (0..=ell).rev() {
        let mut row = vec![format!("k={k}")];
        for j in 0..=k {
            row.push(cells.q(j, k).order().to_string());
        }
        rows.push(row);
    }
    grid(&rows)
}

/// Generators as explicit branch-triple sequences, one line per
/// nontrivial generator.
pub fn render_generators(sec: &TrellisSection, basis: &GeneratorBasis) -> String {
    let mut out = String::new();
    for k in 0..=basis.ell() {
        for u in 1..basis.size(k) {
            let path: Vec<String> = basis
                .generator(k, u)
                .iter()
                .map(|&b| {
                    let br = sec.branch(b);
                    format!("({},{},{})", br.left, br.label, br.right)
                })
                .collect();
            let _ = writeln!(out, "g[{k}][{u}] = {}", path.join(" "));
        }
    }
    if out.is_empty() {
        out.push_str("(identity generators only)\n");
    }
    out
}
