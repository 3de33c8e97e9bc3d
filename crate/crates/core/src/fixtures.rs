//! Hand-sized sections and groups shared by the whole test suite.
//!
//! - `fix_a`: trivial state group, alphabet Z2 (memoryless).
//! - `fix_b`: Sigma = Z2, A = Z2 x Z2, branches (s, (u, u+s), u); index 1.
//! - `fix_c`: Sigma = Z2 x Z2, A = Z2, branches ((s1,s2), u, (u,s1)); index 2.
//! - `fix_e`: the direct product of fix_a and fix_b; index 1 with
//!   nontrivial coset sizes at every level.
//! - `fix_d_chain`: S3 with the chain 1 < A3 < S3, for the expansion
//!   machinery (no trellis involved).
//! - `frozen`: a section whose reachable set never grows, i.e. not
//!   controllable.

use crate::group::{FiniteGroup, Subgroup};
use crate::trellis::TrellisSection;

pub fn fix_a() -> TrellisSection {
    let sigma = FiniteGroup::cyclic(1);
    let alphabet = FiniteGroup::cyclic(2);
    TrellisSection::new(sigma, alphabet, &[(0, 0, 0), (0, 1, 0)]).expect("fix_a is valid")
}

pub fn fix_b() -> TrellisSection {
    let sigma = FiniteGroup::cyclic(2);
    let alphabet = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
    let mut triples = Vec::new();
    for s in 0..2 {
        for u in 0..2 {
            let label = 2 * u + (u ^ s);
            triples.push((s, label, u));
        }
    }
    TrellisSection::new(sigma, alphabet, &triples).expect("fix_b is valid")
}

pub fn fix_c() -> TrellisSection {
    let sigma = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
    let alphabet = FiniteGroup::cyclic(2);
    let mut triples = Vec::new();
    for s1 in 0..2 {
        for s2 in 0..2 {
            for u in 0..2 {
                triples.push((2 * s1 + s2, u, 2 * u + s1));
            }
        }
    }
    TrellisSection::new(sigma, alphabet, &triples).expect("fix_c is valid")
}

/// Componentwise product of two sections.
pub fn product_section(a: &TrellisSection, b: &TrellisSection) -> TrellisSection {
    let sigma = a.sigma().direct_product(b.sigma());
    let alphabet = a.alphabet().direct_product(b.alphabet());
    let ns = b.sigma().order();
    let na = b.alphabet().order();
    let mut triples = Vec::new();
    for ba in a.branches() {
        for bb in b.branches() {
            triples.push((
                ba.left * ns + bb.left,
                ba.label * na + bb.label,
                ba.right * ns + bb.right,
            ));
        }
    }
    TrellisSection::new(sigma, alphabet, &triples).expect("product of valid sections is valid")
}

pub fn fix_e() -> TrellisSection {
    product_section(&fix_a(), &fix_b())
}

/// S3 together with the normal chain 1 < A3 < S3.
pub fn fix_d_chain() -> (FiniteGroup, Vec<Subgroup>) {
    let s3 = FiniteGroup::symmetric(3);
    let a3 = Subgroup::new(&s3, [0, 3, 4]).expect("A3 is a subgroup");
    let whole = Subgroup::whole(&s3);
    (s3, vec![a3, whole])
}

/// Identity-only transitions: every state is frozen in place, so the
/// reachable set of X0 never grows past the identity state.
pub fn frozen() -> TrellisSection {
    let sigma = FiniteGroup::cyclic(2);
    let alphabet = FiniteGroup::cyclic(1);
    TrellisSection::new(sigma, alphabet, &[(0, 0, 0), (1, 0, 1)]).expect("frozen is valid")
}
