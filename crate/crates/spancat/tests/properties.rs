use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use spancat::cli::{parse, Document};
use spancat::dualize::{classification_laws, dual_cc, fiber_preservation_check};
use spancat::fibrations::{classify, is_isofibration, isofibrant_replacement, taxonomy_laws, FibredFunctor};
use spancat::fincat::{
    cones, enumerate_functors, equivalent_categories, equivalent_over_base, is_limit_cone, opposite, product,
    pullback, FinCat, FinFunctor,
};
use spancat::grothendieck::{straighten_ortho, unstraighten_ortho, CurryOrder};
use spancat::mates::{double_mate_check, mate_of_lax, mate_via_dualization, oplax_agree, standard_lax_corpus};
use spancat::monoidal::{doctrinal_mate, doctrinal_round_trip, lax_monoidal_corpus};
use spancat::shapes::twisted_arrow_cat;
use spancat::triplespan::{poset_triples, reverse_triple, span_homotopy_category};

/// Reflexive-transitive closure of a random relation on `n` points.
fn closure(n: usize, bits: &[bool]) -> Vec<Vec<bool>> {
    let mut r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || bits[i * n + j]).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

fn preorder_of(r: &[Vec<bool>]) -> Arc<FinCat> {
    let names = (0..r.len()).map(|i| format!("o{i}")).collect();
    Arc::new(FinCat::preorder(names, |x, y| r[x][y]).unwrap())
}

fn relation(max: usize, density: f64) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1..=max).prop_flat_map(move |n| {
        prop::collection::vec(prop::bool::weighted(density), n * n).prop_map(move |bits| closure(n, &bits))
    })
}

fn preorder(max: usize) -> impl Strategy<Value = Arc<FinCat>> {
    relation(max, 0.3).prop_map(|r| preorder_of(&r))
}

fn monotone(r: &[Vec<bool>], s: &[Vec<bool>], map: &[usize]) -> bool {
    (0..r.len()).all(|x| (0..r.len()).all(|y| !r[x][y] || s[map[x]][map[y]]))
}

/// A random monotone map from a preorder on at most four points to a product
/// of two preorders with at most two points each.
#[derive(Debug, Clone)]
struct RandomFibration {
    total: Vec<Vec<bool>>,
    a: Vec<Vec<bool>>,
    b: Vec<Vec<bool>>,
    map: Vec<(usize, usize)>,
}

impl RandomFibration {
    fn build(&self) -> FibredFunctor {
        self.build_permuted(&(0..self.total.len()).collect::<Vec<_>>())
    }

    /// The same fibration with the objects of the total category listed in
    /// the order `perm`.
    fn build_permuted(&self, perm: &[usize]) -> FibredFunctor {
        let n = perm.len();
        let r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| self.total[perm[i]][perm[j]]).collect()).collect();
        let total = preorder_of(&r);
        let base = product(&preorder_of(&self.a), &preorder_of(&self.b));
        let obj = perm.iter().map(|&i| base.pair_obj(self.map[i].0, self.map[i].1)).collect();
        let proj = FinFunctor::into_thin(total, base.cat.clone(), obj).unwrap();
        FibredFunctor::new(proj, base).unwrap()
    }
}

fn fibration() -> impl Strategy<Value = RandomFibration> {
    (relation(4, 0.3), relation(2, 0.5), relation(2, 0.5))
        .prop_flat_map(|(total, a, b)| {
            let n = total.len();
            let pairs = (0..a.len(), 0..b.len());
            (Just(total), Just(a), Just(b), prop::collection::vec(pairs, n))
        })
        .prop_filter("projection must be monotone", |(total, a, b, map)| {
            let first: Vec<usize> = map.iter().map(|m| m.0).collect();
            let second: Vec<usize> = map.iter().map(|m| m.1).collect();
            monotone(total, a, &first) && monotone(total, b, &second)
        })
        .prop_map(|(total, a, b, map)| RandomFibration { total, a, b, map })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lax_corpus() -> &'static [(spancat::mates::LaxTransformation, Vec<spancat::mates::Adjunction>)] {
    static CORPUS: OnceLock<Vec<(spancat::mates::LaxTransformation, Vec<spancat::mates::Adjunction>)>> =
        OnceLock::new();
    CORPUS.get_or_init(|| standard_lax_corpus().unwrap())
}

fn monoidal_corpus() -> &'static [(spancat::monoidal::LaxMonFunctor, spancat::mates::Adjunction)] {
    static CORPUS: OnceLock<Vec<(spancat::monoidal::LaxMonFunctor, spancat::mates::Adjunction)>> = OnceLock::new();
    CORPUS.get_or_init(|| lax_monoidal_corpus(3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn opposite_is_an_involution(c in preorder(5)) {
        prop_assert!(opposite(&opposite(&c)) == *c);
    }

    #[test]
    fn functor_count_matches_monotone_maps(r in relation(3, 0.3), s in relation(3, 0.3)) {
        let expected = (0..s.len().pow(r.len() as u32))
            .filter(|code| {
                let map: Vec<usize> = (0..r.len()).map(|i| code / s.len().pow(i as u32) % s.len()).collect();
                monotone(&r, &s, &map)
            })
            .count();
        let found = enumerate_functors(&preorder_of(&r), &preorder_of(&s)).unwrap();
        prop_assert_eq!(found.len(), expected);
    }

    #[test]
    fn functors_between_cyclic_groups(n in 1usize..6, m in 1usize..6) {
        let (c, d) = (Arc::new(FinCat::cyclic_group(n)), Arc::new(FinCat::cyclic_group(m)));
        prop_assert_eq!(enumerate_functors(&c, &d).unwrap().len(), gcd(n, m));
    }

    #[test]
    fn pullbacks_are_meets(r in relation(5, 0.35), x in 0usize..5, y in 0usize..5, z in 0usize..5) {
        let n = r.len();
        let (x, y) = (x % n, y % n);
        let upper: Vec<usize> = (0..n).filter(|&w| r[x][w] && r[y][w]).collect();
        prop_assume!(!upper.is_empty());
        let z = upper[z % upper.len()];
        let c = preorder_of(&r);
        let (f, g) = (c.arrow(x, z).unwrap(), c.arrow(y, z).unwrap());
        let lower = |w: usize| r[w][x] && r[w][y];
        let meet_exists = (0..n).any(|w| lower(w) && (0..n).all(|v| !lower(v) || r[v][w]));
        let found = pullback(&c, f, g);
        prop_assert_eq!(found.is_some(), meet_exists);
        if let Some(cone) = found {
            prop_assert!(is_limit_cone(&c, &cone, &cones(&c, f, g)));
        }
    }

    #[test]
    fn skeleta_are_equivalent(c in preorder(4)) {
        let classes = c.iso_classes();
        let reps: Vec<usize> = c.objects().filter(|&x| classes[..x].iter().all(|&k| k != classes[x])).collect();
        let skeleton = Arc::new(c.full_subcategory(&reps).0);
        let eq = equivalent_categories(&c, &skeleton).unwrap();
        prop_assert!(eq.is_some_and(|e| e.triangle_identities_hold()));
    }

    #[test]
    fn twisted_arrows_of_the_opposite(c in preorder(3)) {
        let tw = Arc::new(twisted_arrow_cat(&c).cat.as_ref().clone());
        let tw_op = Arc::new(twisted_arrow_cat(&Arc::new(opposite(&c))).cat.as_ref().clone());
        prop_assert!(equivalent_categories(&tw, &tw_op).unwrap().is_some());
    }

    #[test]
    fn reversed_spans_are_opposite(c in preorder(3), pick in any::<prop::sample::Index>()) {
        let triples = poset_triples(&c);
        prop_assume!(!triples.is_empty());
        let t = &triples[pick.index(triples.len())];
        let spans = span_homotopy_category(t).unwrap();
        let reversed = span_homotopy_category(&reverse_triple(t).unwrap()).unwrap();
        for x in spans.cat.objects() {
            for y in spans.cat.objects() {
                prop_assert_eq!(spans.cat.hom(x, y).len(), reversed.cat.hom(y, x).len());
            }
        }
        let op = Arc::new(opposite(&spans.cat));
        prop_assert!(equivalent_categories(&op, &reversed.cat).unwrap().is_some());
    }

    #[test]
    fn taxonomy_laws_hold(f in fibration()) {
        let p = f.build();
        let report = classify(&p);
        prop_assert!(report.implications_hold());
        let v = taxonomy_laws(&p);
        prop_assert!(v.passed, "{:?}", v.witness);
        for (name, flag) in report.flags() {
            prop_assert_eq!(flag, report.witnesses_for(name).is_empty(), "{}", name);
        }
    }

    #[test]
    fn classification_ignores_object_order(f in fibration(), seed in any::<u64>()) {
        let n = f.total.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let flags = |p: &FibredFunctor| classify(p).flags().map(|(_, b)| b);
        prop_assert_eq!(flags(&f.build()), flags(&f.build_permuted(&perm)));
    }

    #[test]
    fn duals_obey_the_classification_laws(f in fibration()) {
        let p = f.build();
        // the dual needs cartesian lifts of every arrow of the second factor
        prop_assume!(classify(&p).cart_over_b);
        let d = dual_cc(&p).unwrap();
        prop_assert!(d.spans.automorphisms_trivial());
        let fibers = fiber_preservation_check(&p, &d);
        prop_assert!(fibers.passed, "{:?}", fibers.witness);
        let laws = classification_laws(&p, &d);
        prop_assert!(laws.passed, "{:?}", laws.witness);
    }

    #[test]
    fn straightening_round_trips(f in fibration()) {
        let p = f.build();
        prop_assume!(classify(&p).ortho);
        let d = straighten_ortho(&p).unwrap();
        // unstraightenings are isofibrations, so compare with one
        let iso_p = isofibrant_replacement(&p.proj);
        prop_assert!(is_isofibration(&iso_p));
        for order in [CurryOrder::AFirst, CurryOrder::BFirst] {
            let q = unstraighten_ortho(&d, p.base_a(), p.base_b(), order).unwrap();
            prop_assert!(equivalent_over_base(&iso_p, &q.proj).unwrap().is_some());
        }
    }

    #[test]
    fn mates_agree_and_invert(pick in any::<prop::sample::Index>()) {
        let corpus = lax_corpus();
        let (rho, adjs) = &corpus[pick.index(corpus.len())];
        let direct = mate_of_lax(rho, adjs).unwrap();
        let via_dual = mate_via_dualization(rho, adjs).unwrap();
        prop_assert!(oplax_agree(&direct, &via_dual).passed);
        prop_assert!(double_mate_check(rho, adjs).unwrap().passed);
    }

    #[test]
    fn doctrinal_mates_invert(pick in any::<prop::sample::Index>()) {
        let corpus = monoidal_corpus();
        let (g, adj) = &corpus[pick.index(corpus.len())];
        prop_assert!(doctrinal_mate(g, adj).is_ok());
        prop_assert!(doctrinal_round_trip(g, adj).unwrap().passed);
    }

    #[test]
    fn documents_round_trip(c in preorder(4), f in fibration()) {
        let mut doc = Document::new();
        doc.push_category("c", &c);
        doc.push_fibration("p", &f.build());
        let text = doc.serialize();
        let again = parse(&text).unwrap();
        prop_assert_eq!(again.serialize(), text);
        prop_assert_eq!(again.items().len(), doc.items().len());
    }

    #[test]
    fn parsing_token_soup_never_panics(tokens in prop::collection::vec(
        prop::sample::select(vec![
            "CATEGORY", "FUNCTOR", "TRIPLE", "FIBRATION", "DIAGRAM", "ADJUNCTION", "TRANSFORMATION",
            "MONOIDAL", "LAXMONOIDAL", "OBJECTS", "MORPHISMS", "COMPOSE", "INGRESSIVE", "EGRESSIVE",
            "VALUES", "ACTIONS", "COMPOSITORS", "UNIT", "COUNIT", "COMPONENTS", "CELLS", "MU", "MU0",
            "END", "x", "y", "f", "g", "id_x", "C", "#", "\n", "\n", "\n", " ",
        ]),
        0..60,
    )) {
        let text = tokens.join(" ");
        let _ = parse(&text);
    }
}
