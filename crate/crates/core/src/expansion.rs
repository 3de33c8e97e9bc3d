//! Vector expansions along a normal chain.
//!
//! Given 1 = N_{-1} <= N_0 <= ... <= N_ell = G with every level normal
//! in G, an expansion of g is any vector (x_0, .., x_ell) with
//! x_j in N_j whose left-to-right product is g. Expansions multiply by
//! a componentwise product twisted by conjugation with the upper tail,
//! and the classes S_g under that product form a group isomorphic to G.
//! Nothing here depends on trellises; any chain does, which is how the
//! nonabelian cases get exercised.

use thiserror::Error;

use crate::group::{is_normal, FiniteGroup, GroupError, Subgroup};
use crate::trellis::{Chains, TrellisSection};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("chain level {level} is not normal in the group")]
    NotNormalLevel { level: usize },
    #[error("chain level {level} does not contain the previous one")]
    NotAscending { level: usize },
    #[error("chain top has order {got}, expected the whole group ({want})")]
    TopNotWhole { got: usize, want: usize },
    #[error("component {slot} of the vector escapes its chain level")]
    MembershipViolation { slot: usize },
    #[error("class axiom `{axiom}` fails on ({g}, {h})")]
    ClassAxiom {
        axiom: &'static str,
        g: usize,
        h: usize,
    },
    #[error("order {order} exceeds the exhaustive-mode cap {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub const CLASS_GROUP_CAP: usize = 64;

/// An ascending chain of subgroups normal in G, topped by G itself.
#[derive(Clone, Debug)]
pub struct NormalChain {
    group: FiniteGroup,
    levels: Vec<Subgroup>,
}

impl NormalChain {
    pub fn new(group: FiniteGroup, levels: Vec<Subgroup>) -> Result<Self, ExpansionError> {
        assert!(!levels.is_empty());
        for (i, lvl) in levels.iter().enumerate() {
            if !is_normal(&group, lvl) {
                return Err(ExpansionError::NotNormalLevel { level: i });
            }
            if i > 0 && !levels[i - 1].elements().iter().all(|&e| lvl.contains(e)) {
                return Err(ExpansionError::NotAscending { level: i });
            }
        }
        let top = levels.last().unwrap();
        if top.order() != group.order() {
            return Err(ExpansionError::TopNotWhole {
                got: top.order(),
                want: group.order(),
            });
        }
        Ok(NormalChain { group, levels })
    }

    /// The splitting chain X_0 <= .. <= X_ell of a section, as a chain
    /// on the branch group.
    pub fn from_trellis(sec: &TrellisSection, chains: &Chains) -> NormalChain {
        let levels = (0..=chains.ell())
            .map(|j| chains.x(j as isize).clone())
            .collect();
        NormalChain::new(sec.group().clone(), levels).expect("splitting chain is normal")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// N_j, with N_{-1} the trivial subgroup.
    pub fn level(&self, j: isize) -> Subgroup {
        if j < 0 {
            Subgroup::trivial()
        } else {
            self.levels[j as usize].clone()
        }
    }

    pub fn contains_at(&self, j: usize, x: usize) -> bool {
        self.levels[j].contains(x)
    }
}

/// A vector (x_0, .., x_ell) with x_j in N_j.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpansionVector(pub Vec<usize>);

/// One representative per coset of N_j/N_{j-1} for every level, the
/// identity representing the subgroup coset.
#[derive(Clone, Debug)]
pub struct ExpansionBasis {
    /// reps[j]: coset representatives of N_j/N_{j-1}, subgroup first.
    pub reps: Vec<Vec<usize>>,
}

pub fn make_basis(chain: &NormalChain, chooser: crate::group::Chooser) -> ExpansionBasis {
    let g = chain.group();
    let mut reps = Vec::with_capacity(chain.depth() + 1);
    for j in 0..=chain.depth() {
        let below = chain.level(j as isize - 1);
        let mut level_reps = Vec::new();
        let mut seen = vec![false; g.order()];
        for &x in chain.level(j as isize).elements() {
            if seen[x] {
                continue;
            }
            let coset: Vec<usize> = crate::group::complex_product(g, below.elements(), &[x]);
            for &m in &coset {
                seen[m] = true;
            }
            let rep = if coset.contains(&0) {
                0
            } else {
                *chooser.pick(&coset)
            };
            level_reps.push(rep);
        }
        level_reps.sort_unstable();
        reps.push(level_reps);
    }
    ExpansionBasis { reps }
}

/// The unique basis expansion of g: peel the top level by its coset
/// representative, then recurse downward on what is left.
pub fn expand(chain: &NormalChain, basis: &ExpansionBasis, g: usize) -> ExpansionVector {
    let grp = chain.group();
    let ell = chain.depth();
    let mut comps = vec![0usize; ell + 1];
    let mut cur = g;
    for j in (0..=ell).rev() {
        let below = chain.level(j as isize - 1);
        let rep = basis.reps[j]
            .iter()
            .copied()
            .find(|&r| below.contains(grp.op(cur, grp.inv(r))))
            .expect("coset representatives cover the level");
        comps[j] = rep;
        cur = grp.op(cur, grp.inv(rep));
    }
    debug_assert_eq!(cur, 0);
    ExpansionVector(comps)
}

/// Left-to-right product of the components.
pub fn contract(chain: &NormalChain, x: &ExpansionVector) -> usize {
    chain.group().product(x.0.iter().copied())
}

fn check_membership(chain: &NormalChain, x: &ExpansionVector) -> Result<(), ExpansionError> {
    assert_eq!(x.0.len(), chain.depth() + 1);
    for (j, &c) in x.0.iter().enumerate() {
        if !chain.contains_at(j, c) {
            return Err(ExpansionError::MembershipViolation { slot: j });
        }
    }
    Ok(())
}

/// The twisted product: component j of x (*) y is x_j * (t y_j t^-1)
/// with t the upper tail x_{j+1} .. x_ell, and the top components just
/// multiply. Contraction turns (*) into the group product.
pub fn otimes(
    chain: &NormalChain,
    x: &ExpansionVector,
    y: &ExpansionVector,
) -> Result<ExpansionVector, ExpansionError> {
    check_membership(chain, x)?;
    check_membership(chain, y)?;
    let g = chain.group();
    let ell = chain.depth();
    let mut out = vec![0usize; ell + 1];
    for j in 0..=ell {
        let twisted = if j == ell {
            y.0[ell]
        } else {
            let tail = g.product(x.0[j + 1..].iter().copied());
            g.conjugate(tail, y.0[j])
        };
        out[j] = g.op(x.0[j], twisted);
    }
    let result = ExpansionVector(out);
    debug_assert!(check_membership(chain, &result).is_ok());
    Ok(result)
}

/// Every expansion of every element: class_of[g] lists the vectors
/// contracting to g.
pub fn expansion_classes(chain: &NormalChain) -> Vec<Vec<ExpansionVector>> {
    let g = chain.group();
    let ell = chain.depth();
    let mut vectors = vec![Vec::new()];
    for j in 0..=ell {
        let mut next = Vec::new();
        for v in &vectors {
            for &c in chain.level(j as isize).elements() {
                let mut v2: Vec<usize> = v.clone();
                v2.push(c);
                next.push(v2);
            }
        }
        vectors = next;
    }
    let mut classes = vec![Vec::new(); g.order()];
    for v in vectors {
        let vec = ExpansionVector(v);
        classes[contract(chain, &vec)].push(vec);
    }
    classes
}

/// Exhaustive verification that the expansion classes form a group
/// isomorphic to G under the twisted product: contraction is a
/// homomorphism, one-sided translations biject classes onto classes,
/// the class sizes are constant, and associativity holds on all
/// triples of vectors.
pub fn verify_class_group(chain: &NormalChain) -> Result<(), ExpansionError> {
    verify_class_group_with_cap(chain, CLASS_GROUP_CAP)
}

pub fn verify_class_group_with_cap(chain: &NormalChain, cap: usize) -> Result<(), ExpansionError> {
    let g = chain.group();
    if g.order() > cap {
        return Err(ExpansionError::TooLarge {
            order: g.order(),
            cap,
        });
    }
    let classes = expansion_classes(chain);
    let size0 = classes[0].len();
    for (gg, class) in classes.iter().enumerate() {
        if class.len() != size0 {
            return Err(ExpansionError::ClassAxiom {
                axiom: "class sizes constant",
                g: gg,
                h: 0,
            });
        }
    }
    let sorted = |mut v: Vec<ExpansionVector>| {
        v.sort();
        v
    };
    for a in g.elements() {
        for b in g.elements() {
            let ab = g.op(a, b);
            // Contraction homomorphism over every vector pair, plus the
            // full product set landing exactly on the target class.
            let mut products = Vec::new();
            for x in &classes[a] {
                for y in &classes[b] {
                    let p = otimes(chain, x, y)?;
                    if contract(chain, &p) != ab {
                        return Err(ExpansionError::ClassAxiom {
                            axiom: "contraction homomorphism",
                            g: a,
                            h: b,
                        });
                    }
                    products.push(p);
                }
            }
            products.sort();
            products.dedup();
            if products != sorted(classes[ab].clone()) {
                return Err(ExpansionError::ClassAxiom {
                    axiom: "class product equals target class",
                    g: a,
                    h: b,
                });
            }
            // One-sided translations are bijections onto the target.
            for x in &classes[a] {
                let mut image: Vec<ExpansionVector> = classes[b]
                    .iter()
                    .map(|y| otimes(chain, x, y))
                    .collect::<Result<_, _>>()?;
                image.sort();
                image.dedup();
                if image.len() != classes[b].len() {
                    return Err(ExpansionError::ClassAxiom {
                        axiom: "left translation bijective",
                        g: a,
                        h: b,
                    });
                }
            }
            for y in &classes[b] {
                let mut image: Vec<ExpansionVector> = classes[a]
                    .iter()
                    .map(|x| otimes(chain, x, y))
                    .collect::<Result<_, _>>()?;
                image.sort();
                image.dedup();
                if image.len() != classes[a].len() {
                    return Err(ExpansionError::ClassAxiom {
                        axiom: "right translation bijective",
                        g: a,
                        h: b,
                    });
                }
            }
        }
    }
    // Associativity of the twisted product on vectors, and the neutral
    // and inverse classes behaving through contraction.
    let all: Vec<&ExpansionVector> = classes.iter().flatten().collect();
    for x in &all {
        for y in &all {
            for z in &all {
                let lhs = otimes(chain, &otimes(chain, x, y)?, z)?;
                let rhs = otimes(chain, x, &otimes(chain, y, z)?)?;
                if lhs != rhs {
                    return Err(ExpansionError::ClassAxiom {
                        axiom: "associativity",
                        g: contract(chain, x),
                        h: contract(chain, y),
                    });
                }
            }
        }
    }
    for x in &all {
        let gx = contract(chain, x);
        for e in &classes[0] {
            let right = otimes(chain, x, e)?;
            if contract(chain, &right) != gx {
                return Err(ExpansionError::ClassAxiom {
                    axiom: "identity class neutral",
                    g: gx,
                    h: 0,
                });
            }
        }
        let inv = g.inv(gx);
        for y in &classes[inv] {
            let p = otimes(chain, x, y)?;
            if contract(chain, &p) != 0 {
                return Err(ExpansionError::ClassAxiom {
                    axiom: "inverse class",
                    g: gx,
                    h: inv,
                });
            }
        }
    }
    Ok(())
}
