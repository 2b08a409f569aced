mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::*;
use fgkit::family::{domain, phi};
use fgkit::stallings::SubgroupGraph;
use fgkit::{
    exponent_vector, quotient_order, random_reduced_word, smith_normal_form, Alphabet,
    Homomorphism, IntMatrix, Letter, PaperParams, Word,
};

fn y3() -> Arc<Alphabet> {
    Alphabet::numbered("y", 3).unwrap()
}

fn raw_letters(rank: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()).prop_map(|(g, s)| Letter::new(g, s)), 0..max)
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    raw_letters(rank, max).prop_map(move |ls| {
        let alpha = Alphabet::numbered("y", rank).unwrap();
        Word::reduce(&alpha, ls).unwrap()
    })
}

proptest! {
    #[test]
    fn reduce_matches_naive_oracle(raw in raw_letters(3, 40)) {
        let w = Word::reduce(&y3(), raw.clone()).unwrap();
        let ints: Vec<i8> = raw.iter().map(|l| (l.gen() as i8 + 1) * l.sign() as i8).collect();
        prop_assert_eq!(to_raw(&w), naive_reduce(&ints));
        prop_assert!(w.letters().windows(2).all(|p| !p[0].cancels(p[1])));
    }

    #[test]
    fn concat_laws(a in word(3, 20), b in word(3, 20), c in word(3, 20)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        let ab = &a * &b;
        prop_assert_eq!(to_raw(&ab), naive_mul(&to_raw(&a), &to_raw(&b)));
        prop_assert_eq!(ab.inverse(), &b.inverse() * &a.inverse());
    }

    #[test]
    fn power_laws(w in word(3, 12), n in -6i64..6) {
        let mut expected = Word::identity(w.alphabet());
        let step = if n >= 0 { w.clone() } else { w.inverse() };
        for _ in 0..n.unsigned_abs() {
            expected = &expected * &step;
        }
        prop_assert_eq!(w.pow(n), expected);
        prop_assert_eq!(w.pow(-n), w.pow(n).inverse());
    }

    #[test]
    fn canonical_class_matches_naive(w in word(2, 14), c in word(2, 6)) {
        let conj = &(&c * &w) * &c.inverse();
        for oriented in [true, false] {
            prop_assert_eq!(conj.canonical_class(oriented), w.canonical_class(oriented));
        }
        // brute force: least rotation among all rotations (and of the inverse)
        let (core, _) = w.cyclic_reduce();
        let n = core.len().max(1);
        let best = (0..n).map(|k| core.rotate(k).letters().to_vec()).min().unwrap();
        let oriented = w.canonical_class(true);
        prop_assert_eq!(oriented.letters(), &best[..]);
        let inv = core.inverse();
        let best_inv = (0..n).map(|k| inv.rotate(k).letters().to_vec()).min().unwrap();
        let unoriented = best.clone().min(best_inv);
        let either = w.canonical_class(false);
        prop_assert_eq!(either.letters(), &unoriented[..]);
    }

    #[test]
    fn parse_render_round_trip(w in word(3, 30)) {
        prop_assert_eq!(Word::parse(&w.render(), w.alphabet()).unwrap(), w);
    }

    #[test]
    fn homomorphism_laws(
        imgs in prop::collection::vec(word(3, 6), 2),
        a in word(2, 10),
        b in word(2, 10),
    ) {
        let dom = Alphabet::numbered("y", 2).unwrap();
        let h = Homomorphism::new(dom, y3(), imgs).unwrap();
        let ha = h.apply(&a).unwrap();
        let hb = h.apply(&b).unwrap();
        prop_assert_eq!(h.apply(&(&a * &b)).unwrap(), &ha * &hb);
        prop_assert_eq!(h.apply(&a.inverse()).unwrap(), ha.inverse());
        let json = h.to_json();
        prop_assert_eq!(Homomorphism::from_json(&json).unwrap(), h);
    }

    #[test]
    fn compose_applies_in_sequence(
        inner_imgs in prop::collection::vec(word(2, 5), 2),
        outer_imgs in prop::collection::vec(word(3, 5), 2),
        w in word(2, 8),
    ) {
        let two = Alphabet::numbered("y", 2).unwrap();
        let inner = Homomorphism::new(two.clone(), two.clone(), inner_imgs).unwrap();
        let outer = Homomorphism::new(two, y3(), outer_imgs).unwrap();
        let both = Homomorphism::compose(&outer, &inner).unwrap();
        prop_assert_eq!(
            both.apply(&w).unwrap(),
            outer.apply(&inner.apply(&w).unwrap()).unwrap()
        );
    }

    #[test]
    fn exponent_vector_is_additive(a in word(3, 20), b in word(3, 20)) {
        let sum: Vec<i64> = exponent_vector(&a).0.iter()
            .zip(&exponent_vector(&b).0)
            .map(|(x, y)| x + y)
            .collect();
        prop_assert_eq!(exponent_vector(&(&a * &b)).0, sum);
    }

    #[test]
    fn folding_is_order_independent(gens in prop::collection::vec(word(2, 7), 0..4), seed in any::<u64>()) {
        let alpha = Alphabet::numbered("y", 2).unwrap();
        let wedge = SubgroupGraph::wedge(&gens, &alpha).unwrap();
        let a = wedge.fold();
        let b = wedge.fold_shuffled(seed);
        prop_assert_eq!(a.dump(), b.dump());
        prop_assert_eq!(a.rank().unwrap(), b.rank().unwrap());
    }

    #[test]
    fn folded_graph_contains_generator_products(
        gens in prop::collection::vec(word(2, 6), 1..4),
        picks in prop::collection::vec((0usize..4, any::<bool>()), 0..=4),
    ) {
        let alpha = Alphabet::numbered("y", 2).unwrap();
        let g = SubgroupGraph::build(&gens, &alpha).unwrap();
        for w in &gens {
            prop_assert!(g.contains(w).unwrap());
        }
        let mut product = Word::identity(&alpha);
        for (k, inv) in picks {
            let s = &gens[k % gens.len()];
            product = &product * &(if inv { s.inverse() } else { s.clone() });
        }
        prop_assert!(g.contains(&product).unwrap());
        // folded: at most one edge per (vertex, label, direction)
        let mut seen = std::collections::HashSet::new();
        for e in g.edges() {
            prop_assert!(seen.insert((e.from, e.gen, true)));
            prop_assert!(seen.insert((e.to, e.gen, false)));
        }
    }

    #[test]
    fn smith_certificate_and_index(rows in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 1..6)) {
        let m = IntMatrix::from_rows(&rows, 3).unwrap();
        let snf = smith_normal_form(&m).unwrap();
        prop_assert!(snf.verify(&m).unwrap());
        let product = mat_mul(&mat_mul(&snf.u.to_rows(), &rows), &snf.v.to_rows());
        prop_assert_eq!(product, snf.d.to_rows());
        prop_assert_eq!(bareiss_det(&snf.u.to_rows()).abs(), 1);
        prop_assert_eq!(bareiss_det(&snf.v.to_rows()).abs(), 1);
        let q = quotient_order(&m, 3).unwrap();
        match hermite_index(&rows, 3) {
            Some(n) => prop_assert_eq!(q.to_string(), n.to_string()),
            None => prop_assert!(!q.is_finite()),
        }
    }

    #[test]
    fn quotient_order_invariant_under_row_operations(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..5),
        i in 0usize..5, j in 0usize..5, k in -3i64..=3, rot in 0usize..5,
    ) {
        let before = quotient_order(&IntMatrix::from_rows(&rows, 3).unwrap(), 3).unwrap();
        let mut changed = rows.clone();
        let (i, j) = (i % rows.len(), j % rows.len());
        if i != j {
            let src = changed[j].clone();
            for (x, y) in changed[i].iter_mut().zip(src) {
                *x += k * y;
            }
        }
        let n = changed.len();
        changed.rotate_left(rot % n);
        let after = quotient_order(&IntMatrix::from_rows(&changed, 3).unwrap(), 3).unwrap();
        prop_assert_eq!(before, after);
    }
}

// Randomized words in one parity class of generators for the family maps.
fn parity_words(g: usize, even: bool, count: usize, seed: u64) -> Vec<Word> {
    let sub = Alphabet::numbered("s", g).unwrap();
    let dom = domain(g);
    (0..count as u64)
        .map(|k| {
            let w = random_reduced_word(&sub, 1 + (k as usize % 8), seed + k);
            let shift = usize::from(even);
            Word::reduce(
                &dom,
                w.letters().iter().map(|l| Letter::new(2 * l.gen() + shift, l.is_positive())),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn family_images_are_nontrivial_with_block_end_letters() {
    for (g, l) in [(2, 3), (4, 5), (6, 7)] {
        let h = phi(PaperParams::new(g, l).unwrap());
        for even in [true, false] {
            for u in parity_words(g as usize, even, 300, 11) {
                let img = h.apply(&u).unwrap();
                assert!(!img.is_identity(), "{u} maps to 1");
                let ends = [img.first().unwrap().gen(), img.last().unwrap().gen()];
                if even {
                    assert_eq!(ends, [0, 0], "{u} -> {img}");
                } else {
                    assert!(ends.iter().all(|&e| e == 1 || e == 2), "{u} -> {img}");
                }
            }
        }
    }
}

#[test]
fn family_images_of_mixed_words_are_nontrivial() {
    let g = 4;
    let h = phi(PaperParams::new(g, 6).unwrap());
    let dom = domain(g as usize);
    for seed in 0..500 {
        let u = random_reduced_word(&dom, 1 + seed as usize % 10, seed);
        assert!(!h.apply(&u).unwrap().is_identity(), "{u}");
    }
}
