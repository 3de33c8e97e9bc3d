//! End-to-end acceptance checks, one per criterion, each printing a
//! pass line. Everything is exact: algebraic identities at zero
//! tolerance, counts by independent enumeration.

use grouptrellis::encoder::{verify_duality, DualityOutcome, Encoder, EncoderInput};
use grouptrellis::expansion::{expansion_classes, otimes, verify_class_group, NormalChain};
use grouptrellis::fixtures;
use grouptrellis::generators::{change_of_basis, count_generator_bases, verify_complete_system};
use grouptrellis::group::Chooser;
use grouptrellis::shiftbank::{
    brute_force_graph_automorphisms, build_graph, count_automorphisms, enumerate_automorphisms,
    is_graph_automorphism, UBank,
};
use grouptrellis::trellis::{compute_chains, segment_paths_from, TrellisSection};
use grouptrellis::Analysis;

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn analyses() -> Vec<Analysis> {
    [
        fixtures::fix_a(),
        fixtures::fix_b(),
        fixtures::fix_c(),
        fixtures::fix_e(),
    ]
    .into_iter()
    .map(|sec| Analysis::run(sec).unwrap())
    .collect()
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
fn acceptance_1_fixture_structure() {
    let b = Analysis::run(fixtures::fix_b()).unwrap();
    assert_eq!(b.chains.ell(), 1);
    assert_eq!(b.section.splitting_kernel().order(), 2);
    assert_eq!(b.section.merging_kernel().order(), 2);
    assert_eq!(b.granules[1].order(), 2);
    let basis = b.basis(Chooser::Lex).unwrap();
    let nontrivial: usize = (0..=1).map(|k| basis.size(k) - 1).sum();
    assert_eq!(nontrivial, 1, "exactly one nontrivial generator");

    let c = Analysis::run(fixtures::fix_c()).unwrap();
    assert_eq!(c.chains.ell(), 2);
    assert_eq!(
        c.granules.iter().map(|g| g.order()).collect::<Vec<_>>(),
        vec![1, 1, 2]
    );

    let e = Analysis::run(fixtures::fix_e()).unwrap();
    assert_eq!(
        e.granules.iter().map(|g| g.order()).collect::<Vec<_>>(),
        vec![2, 2]
    );
    let seg = grouptrellis::generators::code_segment(&e.section, &e.chains, 1).unwrap();
    assert_eq!(seg.boundary.len(), 4);

    println!("PASS acceptance 1: fixture structure");
}

#[test]
fn acceptance_2_theorem_suite() {
    for analysis in analyses() {
        let sec = &analysis.section;
        grouptrellis::schreier::verify_shift_property(sec, &analysis.matrix).unwrap();
        grouptrellis::schreier::verify_rectangle(sec, &analysis.delta, &analysis.cells).unwrap();
        grouptrellis::schreier::verify_zassenhaus_form(sec, &analysis.chains, &analysis.cells)
            .unwrap();
        grouptrellis::generators::verify_granule_window_iso(
            sec,
            &analysis.delta,
            &analysis.granules,
        )
        .unwrap();
        let basis = analysis.basis(Chooser::Lex).unwrap();
        verify_complete_system(sec, &basis).unwrap();
        grouptrellis::generators::verify_component_transversals(&analysis.cells, &basis).unwrap();
        grouptrellis::generators::verify_reversed_transversal(sec, &basis).unwrap();
        // The factorization bijection also forces the cardinality
        // identity |B| = product of the quotient-cell orders.
        let product: usize = analysis.cells.order_rows().iter().flatten().product();
        assert_eq!(product, sec.branch_count());
    }
    println!("PASS acceptance 2: theorem suite exact on all fixtures");
}

#[test]
fn acceptance_3_encoder() {
    let mut rng = StdRng::seed_from_u64(2024);
    for analysis in analyses() {
        let basis = analysis.basis(Chooser::Lex).unwrap();
        let enc = Encoder::new(&analysis.section, &analysis.matrix, &basis);
        // Impulse response reproduces every generator.
        for k in 0..=enc.ell() {
            for u in 0..basis.size(k) {
                assert_eq!(enc.impulse_response(k, u), basis.generator(k, u));
            }
        }
        // track then encode, and encode then track, over random walks.
        let x0 = analysis.matrix.cell(0, enc.ell()).elements().to_vec();
        for _ in 0..100 {
            let path = random_path(&analysis.section, &mut rng, 20);
            let track = enc.track(&path).unwrap();
            assert_eq!(enc.run(&track.initial_state, &track.inputs).unwrap(), path);

            let inputs: Vec<usize> = (0..20).map(|_| x0[rng.gen_range(0..x0.len())]).collect();
            let path = enc.run(&enc.initial_state(), &inputs).unwrap();
            let back = enc.track(&path).unwrap();
            assert_eq!(back.initial_state, enc.initial_state());
            assert_eq!(back.inputs, inputs);
        }
        // Reachable states count the state group.
        assert_eq!(
            enc.reachable_states().len(),
            analysis.section.sigma().order()
        );
    }

    // Estimation degradation: pairs sharing a start branch stay within
    // one chain level per epoch; exhaustive on fix_b, sampled on fix_c.
    let sec = fixtures::fix_b();
    let chains = compute_chains(&sec).unwrap();
    for b0 in 0..sec.branch_count() {
        let all = segment_paths_from(&sec, &[b0], 1);
        for p in all.paths() {
            for q in all.paths() {
                for j in 1..p.len() {
                    let diff = sec.group().op(p[j], sec.group().inv(q[j]));
                    assert!(chains.x(j as isize - 1).contains(diff));
                }
            }
        }
    }
    let sec = fixtures::fix_c();
    let chains = compute_chains(&sec).unwrap();
    for _ in 0..200 {
        let b0 = rng.gen_range(0..sec.branch_count());
        let mut p = vec![b0];
        let mut q = vec![b0];
        for t in 0..2 {
            let sp = sec.next_branch_set(p[t]);
            p.push(sp[rng.gen_range(0..sp.len())]);
            let sq = sec.next_branch_set(q[t]);
            q.push(sq[rng.gen_range(0..sq.len())]);
        }
        for j in 1..p.len() {
            let diff = sec.group().op(p[j], sec.group().inv(q[j]));
            assert!(chains.x(j as isize - 1).contains(diff));
        }
    }
    println!("PASS acceptance 3: encoder impulse/track/state-count/degradation");
}

#[test]
fn acceptance_4_automorphisms() {
    let fix_b_bank = {
        let a = Analysis::run(fixtures::fix_b()).unwrap();
        UBank::from_cells(&a.cells)
    };
    let fix_c_bank = {
        let a = Analysis::run(fixtures::fix_c()).unwrap();
        UBank::from_cells(&a.cells)
    };
    let two_two = UBank::new(vec![2, 2]);

    for (bank, want) in [(&fix_b_bank, 2u64), (&fix_c_bank, 2), (&two_two, 8)] {
        let count = count_automorphisms(bank);
        assert_eq!(count, BigUint::from(want));
        let auts = enumerate_automorphisms(bank, 10_000).unwrap();
        assert_eq!(auts.len() as u64, want);
        let graph = build_graph(bank, 100_000).unwrap();
        let tables: Vec<Vec<usize>> = auts
            .iter()
            .map(|a| {
                let t = a.edge_permutation(&graph);
                assert!(is_graph_automorphism(&graph, &t));
                t
            })
            .collect();
        // Closed under composition and inverse.
        for p in &tables {
            for q in &tables {
                let comp: Vec<usize> = (0..p.len()).map(|i| p[q[i]]).collect();
                assert!(tables.contains(&comp));
            }
            let mut inv = vec![0; p.len()];
            for (i, &v) in p.iter().enumerate() {
                inv[v] = i;
            }
            assert!(tables.contains(&inv));
        }
    }

    // Brute-force plain-graph counts: equality without parallel edges,
    // dominance with them.
    let g = build_graph(&fix_b_bank, 100_000).unwrap();
    assert_eq!(
        brute_force_graph_automorphisms(&g).unwrap(),
        BigUint::from(2u64)
    );
    let g = build_graph(&two_two, 100_000).unwrap();
    let brute = brute_force_graph_automorphisms(&g).unwrap();
    assert_eq!(brute, BigUint::from(32u64));
    assert!(count_automorphisms(&two_two) <= brute);
    println!("PASS acceptance 4: automorphism counts, soundness, closure, brute-force bounds");
}

#[test]
fn acceptance_5_generator_bases() {
    for (sec, want, aut_bound) in [
        (fixtures::fix_b(), 1u64, 2u64),
        (fixtures::fix_c(), 1, 2),
        (fixtures::fix_e(), 4, 8),
    ] {
        let analysis = Analysis::run(sec).unwrap();
        let count = count_generator_bases(&analysis.granules, 1 << 20).unwrap();
        assert_eq!(count, want);
        let bank = UBank::from_cells(&analysis.cells);
        assert!(BigUint::from(count) <= count_automorphisms(&bank));
        assert_eq!(count_automorphisms(&bank), BigUint::from(aut_bound));
    }
    let analysis = Analysis::run(fixtures::fix_e()).unwrap();
    let lex = analysis.basis(Chooser::Lex).unwrap();
    let rev = analysis.basis(Chooser::RevLex).unwrap();
    let map = change_of_basis(&analysis.section, &analysis.matrix, &lex, &rev).unwrap();
    assert!(!map.is_identity());
    println!("PASS acceptance 5: basis counts within automorphism bounds, consistent basis change");
}

#[test]
fn acceptance_6_expansion_classes() {
    let (s3, levels) = fixtures::fix_d_chain();
    let chain = NormalChain::new(s3, levels).unwrap();
    verify_class_group(&chain).unwrap();

    let sec = fixtures::fix_b();
    let chains = compute_chains(&sec).unwrap();
    let chain = NormalChain::from_trellis(&sec, &chains);
    verify_class_group(&chain).unwrap();
    // Abelian degeneration: the twisted product is componentwise, and
    // contraction is a homomorphism over every pair.
    assert!(chain.group().is_abelian());
    let classes = expansion_classes(&chain);
    for x in classes.iter().flatten() {
        for y in classes.iter().flatten() {
            let p = otimes(&chain, x, y).unwrap();
            let plain: Vec<usize> =
                x.0.iter()
                    .zip(y.0.iter())
                    .map(|(&a, &b)| chain.group().op(a, b))
                    .collect();
            assert_eq!(p.0, plain);
            let g = chain.group();
            assert_eq!(
                grouptrellis::expansion::contract(&chain, &p),
                g.op(
                    grouptrellis::expansion::contract(&chain, x),
                    grouptrellis::expansion::contract(&chain, y)
                )
            );
        }
    }
    println!(
        "PASS acceptance 6: expansion class groups on the nonabelian chain and the trellis chain"
    );
}

#[test]
fn acceptance_7_encoder_duality() {
    for analysis in analyses() {
        assert!(analysis.section.group().is_abelian());
        let basis = analysis.basis(Chooser::Lex).unwrap();
        let enc = Encoder::new(&analysis.section, &analysis.matrix, &basis);
        let x0 = analysis.matrix.cell(0, enc.ell()).elements().to_vec();
        // Every input sequence of length <= 4, exact output equality
        // between the two product orderings.
        let mut histories: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..4 {
            let mut next = Vec::new();
            for h in &histories {
                for &x in &x0 {
                    let mut h2 = h.clone();
                    h2.push(x);
                    next.push(h2);
                }
            }
            for h in &next {
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
            histories = next;
        }
        assert_eq!(
            verify_duality(&analysis.section, &basis),
            DualityOutcome::Equal
        );
    }
    println!("PASS acceptance 7: column-row and row-column encoders agree on abelian fixtures");
}
