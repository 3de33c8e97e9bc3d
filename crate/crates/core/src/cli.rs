//! File formats and the command implementations behind the binary.
//!
//! Sections travel as JSON documents with Cayley tables for the state
//! and label groups and the branch triples; groups with a chain travel
//! as a table plus a list of element lists. Commands write results to
//! the supplied writer and diagnostics to stderr, and return the
//! process exit code: 0 ok, 2 parse failure, 3 invalid section or
//! group, 4 not controllable, 5 bad stream symbol, 6 a verification
//! failed.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{run_suite, Analysis, AnalysisError};
use crate::encoder::{Encoder, EncoderError, EncoderInput};
use crate::expansion::{
    contract, expand, make_basis, verify_class_group, ExpansionError, NormalChain,
};
use crate::group::{Chooser, FiniteGroup, Subgroup};
use crate::report;
use crate::shiftbank::{
    brute_force_graph_automorphisms, build_graph, count_automorphisms, enumerate_automorphisms,
    separating_permutations, UBank,
};
use crate::trellis::{TrellisError, TrellisSection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NOT_CONTROLLABLE: i32 = 4;
pub const EXIT_BAD_SYMBOL: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportMode {
    #[default]
    Text,
    Machine,
}

/// A section on disk: two Cayley tables and the branch triples.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrellisSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub sigma: Vec<Vec<usize>>,
    pub alphabet: Vec<Vec<usize>>,
    pub branches: Vec<[usize; 3]>,
}

impl TrellisSpecFile {
    pub fn from_section(name: Option<&str>, sec: &TrellisSection) -> Self {
        let table = |g: &FiniteGroup| -> Vec<Vec<usize>> {
            (0..g.order())
                .map(|a| (0..g.order()).map(|b| g.op(a, b)).collect())
                .collect()
        };
        TrellisSpecFile {
            name: name.map(str::to_string),
            sigma: table(sec.sigma()),
            alphabet: table(sec.alphabet()),
            branches: sec
                .branches()
                .iter()
                .map(|b| [b.left, b.label, b.right])
                .collect(),
        }
    }
}

/// A plain group with an ascending chain of subgroups (each listed as
/// its element set; the top level must be the whole group).
#[derive(Debug, Serialize, Deserialize)]
pub struct GroupChainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub table: Vec<Vec<usize>>,
    pub chain: Vec<Vec<usize>>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_section(path: &Path) -> Result<(TrellisSection, Option<String>), (i32, String)> {
    let file: TrellisSpecFile = read_json(path).map_err(|e| (EXIT_PARSE, e))?;
    let sigma = FiniteGroup::from_table(file.sigma)
        .map_err(|e| (EXIT_INVALID, format!("state group: {e}")))?;
    let alphabet = FiniteGroup::from_table(file.alphabet)
        .map_err(|e| (EXIT_INVALID, format!("label group: {e}")))?;
    let triples: Vec<(usize, usize, usize)> =
        file.branches.iter().map(|b| (b[0], b[1], b[2])).collect();
    let sec = TrellisSection::new(sigma, alphabet, &triples)
        .map_err(|e| (EXIT_INVALID, e.to_string()))?;
    Ok((sec, file.name))
}

pub fn load_group_chain(path: &Path) -> Result<(NormalChain, Option<String>), (i32, String)> {
    let file: GroupChainFile = read_json(path).map_err(|e| (EXIT_PARSE, e))?;
    let group = FiniteGroup::from_table(file.table).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    let mut levels = Vec::new();
    for (i, elems) in file.chain.iter().enumerate() {
        levels.push(
            Subgroup::new(&group, elems.iter().copied())
                .map_err(|e| (EXIT_INVALID, format!("chain level {i}: {e}")))?,
        );
    }
    let chain = NormalChain::new(group, levels).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    Ok((chain, file.name))
}

fn fail(code: i32, msg: &str) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn analysis_exit(e: &AnalysisError) -> i32 {
    match e {
        AnalysisError::Trellis(TrellisError::NotControllable { .. }) => EXIT_NOT_CONTROLLABLE,
        _ => EXIT_INVALID,
    }
}

pub fn cmd_validate(path: &Path, mode: ReportMode, out: &mut dyn Write) -> i32 {
    let (sec, name) = match load_section(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    match mode {
        ReportMode::Text => {
            if let Some(n) = &name {
                let _ = writeln!(out, "name: {n}");
            }
            let _ = writeln!(
                out,
                "valid section: |Sigma| = {}, |A| = {}, |B| = {}",
                sec.sigma().order(),
                sec.alphabet().order(),
                sec.branch_count()
            );
            let _ = writeln!(out, "subdirect: yes");
        }
        ReportMode::Machine => {
            let _ = writeln!(
                out,
                "{}",
                json!({
                    "name": name,
                    "valid": true,
                    "sigma_order": sec.sigma().order(),
                    "alphabet_order": sec.alphabet().order(),
                    "branch_count": sec.branch_count(),
                })
            );
        }
    }
    EXIT_OK
}

pub fn cmd_analyze(path: &Path, max_enum: u64, mode: ReportMode, out: &mut dyn Write) -> i32 {
    let (sec, name) = match load_section(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let analysis = match Analysis::run(sec) {
        Ok(a) => a,
        Err(e) => return fail(analysis_exit(&e), &e.to_string()),
    };
    let basis = match analysis.basis(Chooser::Lex) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_INVALID, &e.to_string()),
    };
    let bank = UBank::from_cells(&analysis.cells);
    let count = count_automorphisms(&bank);
    let enumerated = enumerate_automorphisms(&bank, max_enum)
        .map(|a| a.len() as u64)
        .ok();
    let brute = build_graph(&bank, max_enum.max(1))
        .ok()
        .and_then(|g| brute_force_graph_automorphisms(&g).ok());
    match mode {
        ReportMode::Text => {
            if let Some(n) = &name {
                let _ = writeln!(out, "name: {n}");
            }
            let sec = &analysis.section;
            let _ = writeln!(
                out,
                "|Sigma| = {}, |A| = {}, |B| = {}",
                sec.sigma().order(),
                sec.alphabet().order(),
                sec.branch_count()
            );
            let _ = writeln!(out, "controllability index: {}", analysis.chains.ell());
            let orders = |v: Vec<usize>| {
                v.iter()
                    .map(|o| o.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(
                out,
                "splitting chain orders: {}",
                orders(analysis.chains.x_orders())
            );
            let _ = writeln!(
                out,
                "merging chain orders: {}",
                orders(analysis.chains.y_orders())
            );
            let _ = writeln!(out, "refinement matrix (cell orders):");
            let _ = write!(out, "{}", report::render_schreier(&analysis.schreier));
            let _ = writeln!(out, "controllable matrix (cell orders):");
            let _ = write!(out, "{}", report::render_controllable(&analysis.matrix));
            let _ = writeln!(out, "quotient cells (orders):");
            let _ = write!(out, "{}", report::render_quotient_cells(&analysis.cells));
            for k in 0..=analysis.cells.ell() {
                if analysis.cells.row_check(k) == crate::schreier::IsoCheck::OrderOnly {
                    let _ = writeln!(
                        out,
                        "note: row {k} checked by order only (isomorphism search over cap)"
                    );
                }
            }
            let _ = writeln!(
                out,
                "granule orders: {}",
                orders(analysis.granules.iter().map(|g| g.order()).collect())
            );
            let _ = writeln!(out, "generators:");
            let _ = write!(out, "{}", report::render_generators(sec, &basis));
            let _ = writeln!(
                out,
                "register-bank row sizes: {}",
                orders(bank.sizes().to_vec())
            );
            let _ = writeln!(out, "bank automorphisms (formula): {count}");
            match enumerated {
                Some(n) => {
                    let _ = writeln!(out, "bank automorphisms (enumerated): {n}");
                }
                None => {
                    let _ = writeln!(out, "bank automorphisms (enumerated): skipped (over cap)");
                }
            }
            match brute {
                Some(n) => {
                    let _ = writeln!(out, "plain graph automorphisms (brute force): {n}");
                }
                None => {
                    let _ = writeln!(
                        out,
                        "plain graph automorphisms (brute force): skipped (over cap)"
                    );
                }
            }
        }
        ReportMode::Machine => {
            let _ = writeln!(
                out,
                "{}",
                json!({
                    "name": name,
                    "ell": analysis.chains.ell(),
                    "splitting_chain_orders": analysis.chains.x_orders(),
                    "merging_chain_orders": analysis.chains.y_orders(),
                    "quotient_cell_orders": analysis.cells.order_rows(),
                    "granule_orders": analysis.granules.iter().map(|g| g.order()).collect::<Vec<_>>(),
                    "bank_row_sizes": bank.sizes(),
                    "automorphism_count": count.to_string(),
                    "automorphisms_enumerated": enumerated,
                    "plain_graph_automorphisms": brute.map(|b| b.to_string()),
                })
            );
        }
    }
    EXIT_OK
}

fn read_stream(input: &mut dyn BufRead) -> Result<Vec<usize>, String> {
    let mut symbols = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| e.to_string())?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        symbols.push(
            token
                .parse::<usize>()
                .map_err(|_| format!("bad symbol `{token}`"))?,
        );
    }
    Ok(symbols)
}

fn encoder_setup(path: &Path) -> Result<Analysis, (i32, String)> {
    let (sec, _) = load_section(path)?;
    Analysis::run(sec).map_err(|e| (analysis_exit(&e), e.to_string()))
}

pub fn cmd_encode(
    path: &Path,
    chooser: Chooser,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> i32 {
    let analysis = match encoder_setup(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let basis = match analysis.basis(chooser) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_INVALID, &e.to_string()),
    };
    let enc = Encoder::new(&analysis.section, &analysis.matrix, &basis);
    let inputs = match read_stream(input) {
        Ok(v) => v,
        Err(msg) => return fail(EXIT_BAD_SYMBOL, &msg),
    };
    let mut state = enc.initial_state();
    for x in inputs {
        if x >= analysis.section.branch_count() {
            return fail(EXIT_BAD_SYMBOL, &format!("branch index {x} out of range"));
        }
        match enc.step(&state, &EncoderInput::Branch(x)) {
            Ok((b, next)) => {
                let _ = writeln!(out, "{b}");
                state = next;
            }
            Err(EncoderError::InputNotInX0 { branch }) => {
                return fail(
                    EXIT_BAD_SYMBOL,
                    &format!("branch {branch} is not a valid input (outside the splitting kernel)"),
                );
            }
            Err(e) => return fail(EXIT_BAD_SYMBOL, &e.to_string()),
        }
    }
    EXIT_OK
}

pub fn cmd_track(
    path: &Path,
    chooser: Chooser,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> i32 {
    let analysis = match encoder_setup(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let basis = match analysis.basis(chooser) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_INVALID, &e.to_string()),
    };
    let enc = Encoder::new(&analysis.section, &analysis.matrix, &basis);
    let path_branches = match read_stream(input) {
        Ok(v) => v,
        Err(msg) => return fail(EXIT_BAD_SYMBOL, &msg),
    };
    if path_branches.is_empty() {
        return EXIT_OK;
    }
    if let Some(&bad) = path_branches
        .iter()
        .find(|&&b| b >= analysis.section.branch_count())
    {
        return fail(EXIT_BAD_SYMBOL, &format!("branch index {bad} out of range"));
    }
    match enc.track(&path_branches) {
        Ok(track) => {
            for x in track.inputs {
                let _ = writeln!(out, "{x}");
            }
            EXIT_OK
        }
        Err(e) => fail(EXIT_BAD_SYMBOL, &e.to_string()),
    }
}

pub fn cmd_aut(path: &Path, max_enum: u64, mode: ReportMode, out: &mut dyn Write) -> i32 {
    let (sec, name) = match load_section(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let analysis = match Analysis::run(sec) {
        Ok(a) => a,
        Err(e) => return fail(analysis_exit(&e), &e.to_string()),
    };
    let bank = UBank::from_cells(&analysis.cells);
    let count = count_automorphisms(&bank);
    match mode {
        ReportMode::Machine => {
            let _ = writeln!(
                out,
                "{}",
                json!({
                    "name": name,
                    "bank_row_sizes": bank.sizes(),
                    "automorphism_count": count.to_string(),
                })
            );
            return EXIT_OK;
        }
        ReportMode::Text => {
            if let Some(n) = &name {
                let _ = writeln!(out, "name: {n}");
            }
            let _ = writeln!(
                out,
                "register-bank row sizes: {}",
                bank.sizes()
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            let _ = writeln!(out, "bank automorphisms (formula): {count}");
            match enumerate_automorphisms(&bank, max_enum) {
                Ok(auts) => {
                    let _ = writeln!(out, "enumerated: {}", auts.len());
                    for (i, aut) in auts.iter().enumerate() {
                        let sep = separating_permutations(&bank, aut);
                        let _ = writeln!(out, "automorphism {i}:");
                        for (k, fams) in sep.families.iter().enumerate() {
                            for (key, perm) in fams {
                                let _ = writeln!(out, "  beta[0][{k}] | {:?} -> {:?}", key, perm);
                            }
                        }
                    }
                }
                Err(e) => {
                    let _ = writeln!(out, "enumerated: skipped ({e})");
                }
            }
        }
    }
    EXIT_OK
}

pub fn cmd_expand(path: &Path, element: usize, out: &mut dyn Write) -> i32 {
    let (chain, _) = match load_group_chain(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    if element >= chain.group().order() {
        return fail(EXIT_BAD_SYMBOL, &format!("element {element} out of range"));
    }
    let basis = make_basis(&chain, Chooser::Lex);
    let vector = expand(&chain, &basis, element);
    let comps: Vec<String> = vector.0.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "{}", comps.join(" "));
    debug_assert_eq!(contract(&chain, &vector), element);
    EXIT_OK
}

pub fn cmd_classcheck(path: &Path, out: &mut dyn Write) -> i32 {
    let (chain, name) = match load_group_chain(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    match verify_class_group(&chain) {
        Ok(()) => {
            if let Some(n) = &name {
                let _ = writeln!(out, "name: {n}");
            }
            let _ = writeln!(out, "PASS expansion class group");
            EXIT_OK
        }
        Err(ExpansionError::TooLarge { order, cap }) => fail(
            EXIT_INVALID,
            &format!("group order {order} exceeds the exhaustive cap {cap}"),
        ),
        Err(e) => {
            let _ = writeln!(out, "FAIL expansion class group: {e}");
            EXIT_VERIFY
        }
    }
}

pub fn cmd_verify(path: &Path, chooser: Chooser, corrupt_basis: bool, out: &mut dyn Write) -> i32 {
    let (sec, name) = match load_section(path) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, &msg),
    };
    let analysis = match Analysis::run(sec) {
        Ok(a) => a,
        Err(e) => return fail(analysis_exit(&e), &e.to_string()),
    };
    let basis = match analysis.basis(chooser) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_INVALID, &e.to_string()),
    };
    let basis = if corrupt_basis {
        match (0..=basis.ell()).rev().find(|&k| basis.size(k) > 1) {
            Some(k) => basis.with_component(0, k, 1, 0),
            None => basis,
        }
    } else {
        basis
    };
    if let Some(n) = &name {
        let _ = writeln!(out, "name: {n}");
    }
    let mut all_ok = true;
    for entry in run_suite(&analysis, &basis) {
        match entry.result {
            Ok(()) => {
                let _ = writeln!(out, "PASS {}", entry.name);
            }
            Err(msg) => {
                all_ok = false;
                let _ = writeln!(out, "FAIL {}: {msg}", entry.name);
            }
        }
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}
