//! One-stop construction of everything derivable from a section, plus
//! the named verification suite the `verify` command runs.

use thiserror::Error;

use crate::encoder::{verify_duality, DualityOutcome};
use crate::expansion::{verify_class_group, NormalChain};
use crate::generators::{
    code_segment, extract_generators, granule, verify_complete_system,
    verify_component_transversals, verify_granule_window_iso, verify_reversed_transversal,
    GeneratorBasis, GeneratorError, Granule,
};
use crate::group::Chooser;
use crate::schreier::{
    controllable_matrix, delta_chain, quotient_cells, schreier_matrix, verify_rectangle,
    verify_shift_property, verify_zassenhaus_form, ControllableMatrix, DeltaChain, QuotientCells,
    SchreierError, SchreierMatrix,
};
use crate::trellis::{compute_chains, Chains, TrellisError, TrellisSection};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Trellis(#[from] TrellisError),
    #[error(transparent)]
    Schreier(#[from] SchreierError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

pub struct Analysis {
    pub section: TrellisSection,
    pub chains: Chains,
    pub schreier: SchreierMatrix,
    pub matrix: ControllableMatrix,
    pub delta: DeltaChain,
    pub cells: QuotientCells,
    pub granules: Vec<Granule>,
}

impl Analysis {
    pub fn run(section: TrellisSection) -> Result<Analysis, AnalysisError> {
        let chains = compute_chains(&section)?;
        let schreier = schreier_matrix(&section, &chains);
        let matrix = controllable_matrix(&section, &chains)?;
        let delta = delta_chain(&section, &chains);
        let cells = quotient_cells(&section, &matrix)?;
        let granules = (0..=chains.ell())
            .map(|k| granule(&section, &code_segment(&section, &chains, k)?))
            .collect::<Result<_, _>>()?;
        Ok(Analysis {
            section,
            chains,
            schreier,
            matrix,
            delta,
            cells,
            granules,
        })
    }

    pub fn basis(&self, chooser: Chooser) -> Result<GeneratorBasis, GeneratorError> {
        extract_generators(&self.chains, &self.granules, chooser)
    }
}

/// Outcome of one named check.
pub struct SuiteEntry {
    pub name: &'static str,
    pub result: Result<(), String>,
}

/// Runs every structural theorem against a section and a basis and
/// reports pass/fail per check. The basis is a parameter so a corrupted
/// one can be pushed through deliberately.
pub fn run_suite(analysis: &Analysis, basis: &GeneratorBasis) -> Vec<SuiteEntry> {
    let mut out = Vec::new();
    let mut push = |name: &'static str, result: Result<(), String>| {
        out.push(SuiteEntry { name, result });
    };
    let sec = &analysis.section;

    push(
        "shift property",
        verify_shift_property(sec, &analysis.matrix).map_err(|e| e.to_string()),
    );
    push(
        "rectangle isomorphisms",
        verify_rectangle(sec, &analysis.delta, &analysis.cells).map_err(|e| e.to_string()),
    );
    push(
        "zassenhaus form",
        verify_zassenhaus_form(sec, &analysis.chains, &analysis.cells).map_err(|e| e.to_string()),
    );
    push(
        "component transversals",
        verify_component_transversals(&analysis.cells, basis).map_err(|e| e.to_string()),
    );
    push(
        "complete system of representatives",
        verify_complete_system(sec, basis).map_err(|e| e.to_string()),
    );
    push(
        "reversed transversal",
        verify_reversed_transversal(sec, basis).map_err(|e| e.to_string()),
    );
    push(
        "granule-window correspondence",
        verify_granule_window_iso(sec, &analysis.delta, &analysis.granules)
            .map_err(|e| e.to_string()),
    );
    let duality = match verify_duality(sec, basis) {
        DualityOutcome::Equal => Ok(()),
        DualityOutcome::Restrictions(bad) => {
            if sec.group().is_abelian() {
                Err(format!(
                    "{} label arrays disagree on an abelian group",
                    bad.len()
                ))
            } else {
                // Nonabelian groups are allowed to disagree; that is
                // the commutation restriction, not a failure.
                Ok(())
            }
        }
    };
    push("product-order duality", duality);
    push(
        "expansion class group",
        verify_class_group(&NormalChain::from_trellis(sec, &analysis.chains))
            .map_err(|e| e.to_string()),
    );
    out
}
