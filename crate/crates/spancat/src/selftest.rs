//! The acceptance checks, runnable from the library, the command line and
//! the test suite. Each check enumerates its corpus exhaustively and stops
//! at the first failure with a witness.

use std::sync::Arc;

use crate::dualize::{
    arrow_fibration, build_dual_triple, double_dual_check, dual_cc, fiber_preservation_check, fibration_corpus,
    straightening_compatibility_check, twisted_dual, DualEdge,
};
use crate::error::Result;
use crate::fibrations::{classify, taxonomy_laws, taxonomy_laws_with};
use crate::fincat::{enumerate_functors, equivalent_over_base, FinCat, FinFunctor};
use crate::grothendieck::{left_kan_presheaf, left_kan_universal, yoneda_naturality_check, CatDiagram, Presheaf};
use crate::mates::{double_mate_check, mate_of_lax, mate_via_dualization, oplax_agree, standard_lax_corpus};
use crate::mates::{Adjunction, LaxTransformation};
use crate::monoidal::{doctrinal_mate, doctrinal_round_trip, lax_monoidal_corpus, StrictMonCat};
use crate::shapes::{simplex, twisted_arrow_cat};
use crate::triplespan::{
    barwick_cocartesian_test, perp_span_isomorphism, perp_triple, posets_up_to_iso, poset_triples,
    segal_completeness_check, span_homotopy_category, square, AdequateTriple, SpanMor, TripleMap,
};
use crate::Verdict;

type Check = fn() -> Result<Verdict>;

pub struct Criterion {
    pub number: usize,
    pub title: &'static str,
    check: Check,
}

impl Criterion {
    pub fn run(&self) -> Result<Verdict> {
        (self.check)()
    }
}

pub fn criteria() -> Vec<Criterion> {
    let list: [(&'static str, Check); 12] = [
        ("twisted arrows of simplices", twisted_simplices),
        ("spans of a product triple", product_spans),
        ("arrow fibrations dualize to twisted arrows", arrow_duals),
        ("dualizing preserves fibers", fibers_preserved),
        ("dualizing twice is the identity", double_duals),
        ("dualizing is compatible with straightening", straightening_compatible),
        ("span categories are complete Segal", segal_spans),
        ("criterion for cocartesian spans", cocartesian_spans),
        ("mates agree with dualized mates", mates_agree),
        ("doctrinal adjunction", doctrinal),
        ("left Kan extensions of presheaves", kan_extensions),
        ("fibration taxonomy laws", taxonomy),
    ];
    list.into_iter()
        .enumerate()
        .map(|(i, (title, check))| Criterion { number: i + 1, title, check })
        .collect()
}

fn chain(n: usize) -> Arc<FinCat> {
    Arc::new(simplex(n))
}

/// Posets with at most `n` elements, one from each isomorphism class.
fn small_posets(n: usize) -> Vec<Arc<FinCat>> {
    (0..=n).flat_map(posets_up_to_iso).collect()
}

/// The poset on intervals `i <= j` of `[2]`, from its covering relations.
fn displayed_twisted_poset() -> Result<FinCat> {
    let names = ["0<=0", "0<=1", "0<=2", "1<=1", "1<=2", "2<=2"];
    let covers = [(2, 1), (2, 4), (1, 0), (1, 3), (4, 3), (4, 5)];
    let n = names.len();
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in &covers {
        le[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    FinCat::preorder(names.iter().map(|s| s.to_string()).collect(), |a, b| le[a][b])
}

fn twisted_simplices() -> Result<Verdict> {
    let tw = twisted_arrow_cat(&chain(2));
    let shown = Arc::new(displayed_twisted_poset()?);
    if !enumerate_functors(&tw.cat, &shown)?.iter().any(|f| f.is_isomorphism()) {
        return Ok(Verdict::fail("Tw([2]) is not isomorphic to the interval poset"));
    }
    for n in 0..=5 {
        let count = twisted_arrow_cat(&chain(n)).cat.num_objects();
        if count != (n + 1) * (n + 2) / 2 {
            return Ok(Verdict::fail(format!("Tw([{n}]) has {count} objects")));
        }
    }
    Ok(Verdict::pass())
}

fn product_spans() -> Result<Verdict> {
    let posets = small_posets(3);
    let iso = Arc::new(FinCat::walking_iso());
    let mut pairs: Vec<(Arc<FinCat>, Arc<FinCat>)> = Vec::new();
    for a in &posets {
        for b in &posets {
            pairs.push((a.clone(), b.clone()));
        }
    }
    for b in posets.iter().chain([&iso]) {
        pairs.push((iso.clone(), b.clone()));
    }
    for (a, b) in pairs {
        let spans = span_homotopy_category(&perp_triple(&a, &b))?;
        if let Err(e) = perp_span_isomorphism(&a, &b, &spans) {
            return Ok(Verdict::fail(format!("{a:?} x {b:?}: {e}")));
        }
    }
    Ok(Verdict::pass())
}

fn arrow_duals() -> Result<Verdict> {
    for (name, c) in [("[1]", chain(1)), ("[2]", chain(2)), ("iso", Arc::new(FinCat::walking_iso()))] {
        let d = dual_cc(&arrow_fibration(&c))?;
        if equivalent_over_base(&d.fibration.proj, &twisted_dual(&c))?.is_none() {
            return Ok(Verdict::fail(format!("the dual of Ar({name}) is not the twisted arrow category")));
        }
    }
    Ok(Verdict::pass())
}

fn fibers_preserved() -> Result<Verdict> {
    for c in fibration_corpus()? {
        let d = dual_cc(&c.fibration)?;
        let v = fiber_preservation_check(&c.fibration, &d);
        if !v.passed {
            return Ok(Verdict::fail(format!("{}: {}", c.base, v.witness.unwrap_or_default())));
        }
    }
    Ok(Verdict::pass())
}

fn double_duals() -> Result<Verdict> {
    for c in fibration_corpus()? {
        let v = double_dual_check(&c.fibration)?;
        if !v.passed {
            return Ok(Verdict::fail(format!("{}: {}", c.base, v.witness.unwrap_or_default())));
        }
    }
    Ok(Verdict::pass())
}

fn straightening_compatible() -> Result<Verdict> {
    let mut orthos = 0;
    for c in fibration_corpus()? {
        if let Some(other) = &c.other_order {
            if equivalent_over_base(&c.fibration.proj, &other.proj)?.is_none() {
                return Ok(Verdict::fail(format!("{}: the curry orders disagree", c.base)));
            }
        }
        if !classify(&c.fibration).ortho {
            continue;
        }
        orthos += 1;
        let v = straightening_compatibility_check(&c.fibration)?;
        if !v.passed {
            return Ok(Verdict::fail(format!("{}: {}", c.base, v.witness.unwrap_or_default())));
        }
    }
    if orthos == 0 {
        return Ok(Verdict::fail("no orthofibrations in the corpus"));
    }
    Ok(Verdict::pass())
}

fn segal_spans() -> Result<Verdict> {
    let mut triples: Vec<(String, AdequateTriple)> = Vec::new();
    for c in small_posets(4) {
        for t in poset_triples(&c) {
            triples.push((format!("{:?}", t.carrier), t));
        }
    }
    let (p1, iso) = (chain(1), Arc::new(FinCat::walking_iso()));
    for (a, b) in [(&p1, &p1), (&iso, &p1), (&p1, &iso)] {
        triples.push((format!("perp {a:?} x {b:?}"), perp_triple(a, b)));
    }
    triples.push(("F(Ar([1]))".into(), build_dual_triple(&arrow_fibration(&p1))?));
    // four mutually isomorphic objects give too many functors out of Tw([3])
    let small = |x: &FinCat| x.num_objects() <= 4 && x.num_morphisms() <= 12;
    for c in fibration_corpus()?.into_iter().filter(|c| small(c.fibration.total())) {
        triples.push((format!("F over {}", c.base), build_dual_triple(&c.fibration)?));
    }
    for (name, t) in triples {
        let report = segal_completeness_check(&t, 3)?;
        if !report.passed() {
            return Ok(Verdict::fail(format!("{name}: {report:?}")));
        }
    }
    Ok(Verdict::pass())
}

fn cocartesian_spans() -> Result<Verdict> {
    for c in fibration_corpus()? {
        let p = &c.fibration;
        let d = dual_cc(p)?;
        let map = TripleMap::new(p.proj.clone(), d.triple.clone(), perp_triple(p.base_a(), p.base_b()))?;
        for (m, s) in d.spans.spans.iter().enumerate() {
            if d.edge_table[m] != DualEdge::DualCocartesian {
                continue;
            }
            let v = barwick_cocartesian_test(&map, s, p.proj.mor(s.right))?;
            if !v.accepted {
                return Ok(Verdict::fail(format!(
                    "{}: span {} rejected: {}",
                    c.base,
                    d.total().morphism_name(m),
                    v.failure.unwrap_or_default()
                )));
            }
        }
    }
    // a left leg cartesian for the whole map but not over the egressives
    let x = square();
    let (c00, c01, c10, c11) = (0, 1, 2, 3);
    let h = [x.arrow(c00, c10).expect("square"), x.arrow(c01, c11).expect("square")];
    let rest: Vec<_> = x.morphism_ids().filter(|m| !h.contains(m)).collect();
    let src = AdequateTriple::from_members(x.clone(), h, rest)?;
    let tgt = AdequateTriple::from_members(x.clone(), h, x.morphism_ids().collect::<Vec<_>>())?;
    let p = TripleMap::new(FinFunctor::identity(&x), src, tgt)?;
    let phi = x.arrow(c10, c11).expect("square");
    let sigma = SpanMor { source: c11, target: c10, apex: c10, left: phi, right: x.id(c10) };
    if barwick_cocartesian_test(&p, &sigma, x.id(c10))?.accepted {
        return Ok(Verdict::fail("the counterexample on the square is accepted"));
    }
    Ok(Verdict::pass())
}

fn mates_agree() -> Result<Verdict> {
    for (i, (rho, adjs)) in standard_lax_corpus()?.iter().enumerate() {
        let direct = mate_of_lax(rho, adjs)?;
        let v = oplax_agree(&direct, &mate_via_dualization(rho, adjs)?);
        if !v.passed {
            return Ok(Verdict::fail(format!("instance {i}: {}", v.witness.unwrap_or_default())));
        }
        let v = double_mate_check(rho, adjs)?;
        if !v.passed {
            return Ok(Verdict::fail(format!("instance {i} round trip: {}", v.witness.unwrap_or_default())));
        }
    }
    // identity cells with identity adjunctions have identity mates
    let (a, c) = (chain(1), chain(2));
    let d = CatDiagram::constant(&a, &c);
    let cells = a.morphism_ids().map(|_| c.objects().map(|o| c.id(o)).collect()).collect();
    let rho = LaxTransformation::from_components(d.clone(), d, vec![FinFunctor::identity(&c); 2], cells)?;
    let adjs = vec![Adjunction::identity(&c); 2];
    for l in [mate_of_lax(&rho, &adjs)?, mate_via_dualization(&rho, &adjs)?] {
        if !l.cells.iter().all(|c| c.is_identity()) {
            return Ok(Verdict::fail("identity cells have a non-identity mate"));
        }
    }
    Ok(Verdict::pass())
}

fn doctrinal() -> Result<Verdict> {
    let mut strong_counterexample = None;
    for (g, adj) in lax_monoidal_corpus(4)? {
        // the oplax structure is checked for coherence on construction
        let delta = doctrinal_mate(&g, &adj)?;
        let v = doctrinal_round_trip(&g, &adj)?;
        if !v.passed {
            return Ok(Verdict::fail(v.witness.unwrap_or_default()));
        }
        if g.is_strong() && !delta.is_strong() && strong_counterexample.is_none() {
            strong_counterexample = Some(format!(
                "strong {} -> {} with object map {:?} has a left adjoint whose comparison is not invertible",
                describe(&g.source),
                describe(&g.target),
                g.underlying.object_map()
            ));
        }
    }
    Ok(match strong_counterexample {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    })
}

/// A thin monoidal poset as its order, product table and unit.
fn describe(m: &StrictMonCat) -> String {
    let c = &m.carrier;
    let order: Vec<String> = c
        .morphism_ids()
        .filter(|&f| !c.is_identity(f))
        .map(|f| format!("{}<{}", c.src(f), c.dst(f)))
        .collect();
    let table: Vec<Vec<usize>> = c.objects().map(|x| c.objects().map(|y| m.tensor_obj(x, y)).collect()).collect();
    format!("(order {order:?}, products {table:?}, unit {})", m.unit)
}

fn kan_extensions() -> Result<Verdict> {
    let posets = small_posets(4);
    for c in &posets {
        let reps: Vec<Presheaf> = c.objects().map(|o| Presheaf::representable(c, o)).collect();
        for d in &posets {
            let mut tests: Vec<Presheaf> = d.objects().map(|o| Presheaf::representable(d, o)).collect();
            tests.push(Presheaf::terminal(d));
            for f in enumerate_functors(c, d)? {
                if !yoneda_naturality_check(&f) {
                    return Ok(Verdict::fail(format!("naturality fails for {:?}", f.object_map())));
                }
                for p in &reps {
                    let lan = left_kan_presheaf(p, &f);
                    if let Some(g) = tests.iter().find(|g| !left_kan_universal(p, &f, &lan, g)) {
                        return Ok(Verdict::fail(format!(
                            "universal property fails for {:?} against {:?}",
                            f.object_map(),
                            g.sets
                        )));
                    }
                }
            }
        }
    }
    Ok(Verdict::pass())
}

fn taxonomy() -> Result<Verdict> {
    for c in fibration_corpus()? {
        let v = taxonomy_laws(&c.fibration);
        if !v.passed {
            return Ok(Verdict::fail(format!("{}: {}", c.base, v.witness.unwrap_or_default())));
        }
        let d = dual_cc(&c.fibration)?;
        let v = taxonomy_laws(&d.fibration);
        if !v.passed {
            return Ok(Verdict::fail(format!("dual over {}: {}", c.base, v.witness.unwrap_or_default())));
        }
    }
    // hand-corrupted reports on a bifibration and on a Gray fibration
    let p = arrow_fibration(&chain(1));
    let q = dual_cc(&p)?.fibration;
    let (rp, rq) = (classify(&p), classify(&q));
    if !(rp.local_ortho && rp.bifib && rq.gray && rq.cocartesian_fibration && rq.left_fib) {
        return Ok(Verdict::fail("the negative controls start from the wrong reports"));
    }
    type Corrupt = fn(&mut crate::fibrations::FibrationReport);
    let controls: [(&str, bool, Corrupt); 5] = [
        ("local orthofibration", true, |r| r.local_ortho = false),
        ("conservativity", true, |r| r.conservative = false),
        ("bifibration", true, |r| r.bifib = false),
        ("Gray cocartesian", false, |r| r.cocartesian_fibration = false),
        ("Gray left fibration", false, |r| r.left_fib = false),
    ];
    for (name, on_p, corrupt) in controls {
        let (f, mut r) = if on_p { (&p, rp.clone()) } else { (&q, rq.clone()) };
        corrupt(&mut r);
        let v = taxonomy_laws_with(f, &r);
        if v.passed || v.witness.is_none() {
            return Ok(Verdict::fail(format!("corrupted {name} flag is accepted")));
        }
    }
    Ok(Verdict::pass())
}
