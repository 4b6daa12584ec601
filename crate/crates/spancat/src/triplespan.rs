//! Adequate triples, their span categories (up to isomorphism of spans),
//! the cocartesian-edge criterion for span functors, and the Segal and
//! completeness checks for the simplicial object of triple maps out of
//! twisted simplices.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fibrations::{has_sufficient_lifts, Direction, Lens};
use crate::fincat::{
    is_equivalence, is_pullback_square, opposite, product, pullback, search_functors, Budget, Cone, FinCat, FinFunctor,
    FunctorCategory, Mor, Morphism, Obj, SearchSpec, WideSubcat,
};
use crate::shapes::{simplex, tw_index, tw_simplex_triple};

/// A category with ingressive and egressive wide subcategories such that
/// ingressives pull back along egressives, with the legs of the pullback
/// again in the respective classes.
#[derive(Clone, Debug)]
pub struct AdequateTriple {
    pub carrier: Arc<FinCat>,
    pub ingressives: WideSubcat,
    pub egressives: WideSubcat,
}

/// A cospan `ingressive: y -> x <- x' :egressive` violating an axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub ingressive: Mor,
    pub egressive: Mor,
    pub reason: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleValidation {
    pub valid: bool,
    pub counterexamples: Vec<Counterexample>,
}

/// Checks both axioms on every ingressive/egressive cospan. Pullbacks are
/// unique up to isomorphism and both classes contain the isomorphisms, so
/// checking the canonical pullback suffices.
pub fn validate_triple(carrier: &FinCat, ingressives: &WideSubcat, egressives: &WideSubcat) -> TripleValidation {
    let mut counterexamples = Vec::new();
    for f in carrier.morphism_ids().filter(|&f| ingressives.contains(f)) {
        for g in carrier.morphism_ids().filter(|&g| egressives.contains(g) && carrier.dst(g) == carrier.dst(f)) {
            // cone.left: P -> src f (pulled back egressive), cone.right: P -> src g
            match pullback(carrier, f, g) {
                None => counterexamples.push(Counterexample { ingressive: f, egressive: g, reason: "no pullback" }),
                Some(cone) => {
                    if !egressives.contains(cone.left) || !ingressives.contains(cone.right) {
                        counterexamples.push(Counterexample {
                            ingressive: f,
                            egressive: g,
                            reason: "pulled back legs leave their classes",
                        });
                    }
                }
            }
        }
    }
    TripleValidation { valid: counterexamples.is_empty(), counterexamples }
}

/// An ingressive/egressive cospan with its canonical pullback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmbigressiveSquare {
    pub ingressive: Mor,
    pub egressive: Mor,
    pub cone: Cone,
}

impl AdequateTriple {
    pub fn new(carrier: Arc<FinCat>, ingressives: WideSubcat, egressives: WideSubcat) -> Result<Self> {
        if **ingressives.parent() != *carrier || **egressives.parent() != *carrier {
            return Err(Error::InvalidTriple("classes live in a different category".into()));
        }
        let v = validate_triple(&carrier, &ingressives, &egressives);
        if let Some(c) = v.counterexamples.first() {
            return Err(Error::InvalidTriple(format!(
                "{} for {} and {}",
                c.reason,
                carrier.morphism_name(c.ingressive),
                carrier.morphism_name(c.egressive)
            )));
        }
        Ok(AdequateTriple { carrier, ingressives, egressives })
    }

    /// Builds a triple from member lists, closing neither class: both must
    /// already be wide subcategories.
    pub fn from_members(
        carrier: Arc<FinCat>,
        ingressives: impl IntoIterator<Item = Mor>,
        egressives: impl IntoIterator<Item = Mor>,
    ) -> Result<Self> {
        let ing = WideSubcat::new(carrier.clone(), ingressives)?;
        let eg = WideSubcat::new(carrier.clone(), egressives)?;
        AdequateTriple::new(carrier, ing, eg)
    }

    /// `(C, C, C)`; adequate exactly when `C` has all pullbacks.
    pub fn maximal(c: &Arc<FinCat>) -> Result<Self> {
        AdequateTriple::new(c.clone(), WideSubcat::all(c.clone()), WideSubcat::all(c.clone()))
    }

    /// The pullback squares of ingressives along egressives.
    pub fn ambigressive_squares(&self) -> Vec<AmbigressiveSquare> {
        let c = &self.carrier;
        let mut out = Vec::new();
        for f in c.morphism_ids().filter(|&f| self.ingressives.contains(f)) {
            for g in c.morphism_ids().filter(|&g| self.egressives.contains(g) && c.dst(g) == c.dst(f)) {
                let cone = pullback(c, f, g).expect("validated triple");
                out.push(AmbigressiveSquare { ingressive: f, egressive: g, cone });
            }
        }
        out
    }

    /// Whether a commuting square is an ambigressive pullback: horizontal
    /// arrows `top: a -> b`, `bottom: c -> d` ingressive, vertical arrows
    /// `left: a -> c`, `right: b -> d` egressive.
    pub fn is_ambigressive_pullback(&self, top: Mor, left: Mor, right: Mor, bottom: Mor) -> bool {
        let c = &self.carrier;
        self.ingressives.contains(top)
            && self.ingressives.contains(bottom)
            && self.egressives.contains(left)
            && self.egressives.contains(right)
            && is_pullback_square(c, bottom, right, &Cone { apex: c.src(top), left, right: top })
    }
}

/// The same category with the two classes exchanged.
pub fn reverse_triple(t: &AdequateTriple) -> Result<AdequateTriple> {
    AdequateTriple::new(t.carrier.clone(), t.egressives.clone(), t.ingressives.clone())
}

/// `A × B` with ingressives `A × ιB` and egressives `ιA × B`.
pub fn perp_triple(a: &Arc<FinCat>, b: &Arc<FinCat>) -> AdequateTriple {
    let p = product(a, b);
    let cat = p.cat.clone();
    let ing = cat.morphism_ids().filter(|&m| b.is_iso(p.second.mor(m)));
    let eg = cat.morphism_ids().filter(|&m| a.is_iso(p.first.mor(m)));
    AdequateTriple::from_members(cat, ing.collect::<Vec<_>>(), eg.collect::<Vec<_>>())
        .expect("products of isomorphism-closed classes form an adequate triple")
}

/// The triple on the source of `p: Y -> X` whose ingressives are the
/// preimages of base ingressives and whose egressives are the `p`-cartesian
/// arrows over base egressives.
pub fn triple_from_fibration(p: &FinFunctor, base: &AdequateTriple) -> Result<AdequateTriple> {
    if **p.target() != *base.carrier {
        return Err(Error::BaseMismatch("functor does not land in the base triple".into()));
    }
    let lifts = has_sufficient_lifts(p, &base.egressives, Direction::Cartesian);
    if let Some(&(e, x)) = lifts.missing.first() {
        return Err(Error::MissingCartesianLifts(format!(
            "no cartesian lift of {} ending at {}",
            base.carrier.morphism_name(e),
            p.source().object_name(x)
        )));
    }
    let y = p.source().clone();
    let cart = Lens::full(p).marks(Direction::Cartesian);
    let ing: Vec<Mor> = y.morphism_ids().filter(|&f| base.ingressives.contains(p.mor(f))).collect();
    let eg: Vec<Mor> = y.morphism_ids().filter(|&f| cart[f] && base.egressives.contains(p.mor(f))).collect();
    AdequateTriple::from_members(y, ing, eg)
}

/// A functor between adequate triples preserving both classes and the
/// ambigressive pullbacks.
#[derive(Clone, Debug)]
pub struct TripleMap {
    pub functor: FinFunctor,
    pub source: AdequateTriple,
    pub target: AdequateTriple,
}

impl TripleMap {
    pub fn new(functor: FinFunctor, source: AdequateTriple, target: AdequateTriple) -> Result<Self> {
        if **functor.source() != *source.carrier || **functor.target() != *target.carrier {
            return Err(Error::InvalidTriple("functor endpoints differ from the triples".into()));
        }
        let sc = &source.carrier;
        for f in sc.morphism_ids() {
            if source.ingressives.contains(f) && !target.ingressives.contains(functor.mor(f)) {
                return Err(Error::InvalidTriple(format!("ingressive {} is not preserved", sc.morphism_name(f))));
            }
            if source.egressives.contains(f) && !target.egressives.contains(functor.mor(f)) {
                return Err(Error::InvalidTriple(format!("egressive {} is not preserved", sc.morphism_name(f))));
            }
        }
        if let Some(sq) = source.ambigressive_squares().into_iter().find(|sq| !preserves_square(&functor, sq)) {
            return Err(Error::InvalidTriple(format!(
                "pullback of {} along {} is not preserved",
                sc.morphism_name(sq.ingressive),
                sc.morphism_name(sq.egressive)
            )));
        }
        Ok(TripleMap { functor, source, target })
    }

    /// The restriction of the underlying functor to egressives, as a lens.
    fn egressive_lens(&self) -> Lens<'_> {
        Lens::masked(&self.functor, self.target.egressives.mask().to_vec(), self.source.egressives.mask().to_vec())
    }

    fn ingressive_lens(&self) -> Lens<'_> {
        Lens::masked(
            &self.functor,
            self.target.ingressives.mask().to_vec(),
            self.source.ingressives.mask().to_vec(),
        )
    }
}

fn preserves_square(f: &FinFunctor, sq: &AmbigressiveSquare) -> bool {
    let cone = Cone { apex: f.obj(sq.cone.apex), left: f.mor(sq.cone.left), right: f.mor(sq.cone.right) };
    is_pullback_square(f.target(), f.mor(sq.ingressive), f.mor(sq.egressive), &cone)
}

/// A span `source <- apex -> target` with egressive left leg and
/// ingressive right leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanMor {
    pub source: Obj,
    pub target: Obj,
    pub apex: Obj,
    pub left: Mor,
    pub right: Mor,
}

/// Least representative of the isomorphism class of a span: least apex,
/// then least legs, over all isomorphisms into the apex.
pub fn canonical_span(c: &FinCat, apex: Obj, left: Mor, right: Mor) -> SpanMor {
    let mut best = (apex, left, right);
    for w in c.objects() {
        for &u in c.hom(w, apex) {
            if c.is_iso(u) {
                let cand = (w, c.compose(left, u), c.compose(right, u));
                if cand < best {
                    best = cand;
                }
            }
        }
    }
    SpanMor { source: c.dst(left), target: c.dst(right), apex: best.0, left: best.1, right: best.2 }
}

/// The homotopy category of the span category: morphisms are isomorphism
/// classes of spans, stored in canonical form.
#[derive(Clone, Debug)]
pub struct SpanCategory {
    pub cat: Arc<FinCat>,
    pub spans: Vec<SpanMor>,
    /// Per span, the number of apex automorphisms fixing both legs.
    pub automorphisms: Vec<usize>,
}

impl SpanCategory {
    /// Whether every span has only the trivial automorphism, which makes the
    /// truncation to isomorphism classes lossless.
    pub fn automorphisms_trivial(&self) -> bool {
        self.automorphisms.iter().all(|&n| n == 1)
    }

    pub fn index_of(&self, s: &SpanMor) -> Option<Mor> {
        self.cat.hom(s.source, s.target).iter().copied().find(|&m| self.spans[m] == *s)
    }

    /// The morphism represented by an arbitrary span.
    pub fn class_of(&self, carrier: &FinCat, apex: Obj, left: Mor, right: Mor) -> Option<Mor> {
        self.index_of(&canonical_span(carrier, apex, left, right))
    }

    /// The span `x <- x -> y` with identity left leg.
    pub fn forward(&self, carrier: &FinCat, f: Mor) -> Option<Mor> {
        self.class_of(carrier, carrier.src(f), carrier.id(carrier.src(f)), f)
    }

    /// The span `y <- x -> x` with identity right leg.
    pub fn backward(&self, carrier: &FinCat, f: Mor) -> Option<Mor> {
        self.class_of(carrier, carrier.src(f), f, carrier.id(carrier.src(f)))
    }
}

pub fn span_homotopy_category(t: &AdequateTriple) -> Result<SpanCategory> {
    let c = &t.carrier;
    let v = validate_triple(c, &t.ingressives, &t.egressives);
    if !v.valid {
        return Err(Error::InvalidTriple(format!("{} failing cospans", v.counterexamples.len())));
    }
    let mut spans: Vec<SpanMor> = Vec::new();
    let mut seen = HashMap::new();
    for w in c.objects() {
        for &l in c.out_of(w).iter().filter(|&&l| t.egressives.contains(l)) {
            for &r in c.out_of(w).iter().filter(|&&r| t.ingressives.contains(r)) {
                let s = canonical_span(c, w, l, r);
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(s) {
                    e.insert(spans.len());
                    spans.push(s);
                }
            }
        }
    }
    // declared order: by source, then target, then representative
    spans.sort_by_key(|s| (s.source, s.target, s.apex, s.left, s.right));
    let index: HashMap<SpanMor, usize> = spans.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let identity: Vec<Mor> = c.objects().map(|x| index[&canonical_span(c, x, c.id(x), c.id(x))]).collect();
    let morphisms: Vec<Morphism> = spans
        .iter()
        .enumerate()
        .map(|(i, s)| Morphism {
            name: if identity[s.source] == i {
                format!("id_{}", c.object_name(s.source))
            } else {
                format!("[{}|{}]", c.morphism_name(s.left), c.morphism_name(s.right))
            },
            src: s.source,
            dst: s.target,
        })
        .collect();
    let automorphisms = spans
        .iter()
        .map(|s| {
            c.hom(s.apex, s.apex)
                .iter()
                .filter(|&&u| c.is_iso(u) && c.compose(s.left, u) == s.left && c.compose(s.right, u) == s.right)
                .count()
        })
        .collect();
    let names = c.object_names().to_vec();
    let cat = FinCat::from_table(names, morphisms, identity, |g, f| {
        let (s1, s2) = (spans[f], spans[g]);
        let cone = pullback(c, s1.right, s2.left)?;
        let s = canonical_span(c, cone.apex, c.compose(s1.left, cone.left), c.compose(s2.right, cone.right));
        index.get(&s).copied()
    })?;
    Ok(SpanCategory { cat: Arc::new(cat), spans, automorphisms })
}

/// The isomorphism from the span category of `A × B` (ingressives
/// `A × ιB`, egressives `ιA × B`) onto `A × B^op`. A span
/// `(a, b) <- (a', b') -> (a'', b'')` has an invertible A-part on the left
/// and an invertible B-part on the right, and goes to the pair
/// `(r_A ∘ l_A^-1, l_B ∘ r_B^-1)`.
pub fn perp_span_isomorphism(a: &Arc<FinCat>, b: &Arc<FinCat>, spans: &SpanCategory) -> Result<FinFunctor> {
    let ab = product(a, b);
    let target = product(a, &Arc::new(opposite(b)));
    if spans.cat.object_names() != ab.cat.object_names() {
        return Err(Error::ShapeMismatch("span category is not over A × B".into()));
    }
    let mor = spans
        .spans
        .iter()
        .map(|s| {
            let (la, lb) = (ab.first.mor(s.left), ab.second.mor(s.left));
            let (ra, rb) = (ab.first.mor(s.right), ab.second.mor(s.right));
            let fa = a.compose(ra, a.inverse(la)?);
            let fb = b.compose(lb, b.inverse(rb)?);
            Some(target.pair_mor(fa, fb))
        })
        .collect::<Option<Vec<Mor>>>()
        .ok_or_else(|| Error::InvalidTriple("span legs are not in the product classes".into()))?;
    let objs = (0..ab.cat.num_objects()).collect();
    let f = FinFunctor::new(spans.cat.clone(), target.cat.clone(), objs, mor)?;
    if !f.is_isomorphism() {
        return Err(Error::InvalidTriple("span category is not isomorphic to A × B^op".into()));
    }
    Ok(f)
}

/// The functor on span categories induced by a triple map.
pub fn span_functor(p: &TripleMap, source: &SpanCategory, target: &SpanCategory) -> Result<FinFunctor> {
    let f = &p.functor;
    let mor: Option<Vec<Mor>> = source
        .spans
        .iter()
        .map(|s| target.class_of(f.target(), f.obj(s.apex), f.mor(s.left), f.mor(s.right)))
        .collect();
    let mor = mor.ok_or_else(|| Error::InvalidTriple("image span is missing".into()))?;
    FinFunctor::new(source.cat.clone(), target.cat.clone(), f.object_map().to_vec(), mor)
}

/// Outcome of the cocartesian-edge criterion, with the first failing
/// condition when it does not apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarwickVerdict {
    pub accepted: bool,
    pub failure: Option<String>,
}

/// Tests the sufficient condition for the span `sigma` (with right leg over
/// the ingressive `f` of the target triple) to be cocartesian for the
/// induced functor of span categories. The two hypotheses on `f` are checked
/// exhaustively, then the left leg is tested for being cartesian for the
/// restriction to egressives and the right leg for being cocartesian.
pub fn barwick_cocartesian_test(p: &TripleMap, sigma: &SpanMor, f: Mor) -> Result<BarwickVerdict> {
    let (x, y) = (&p.source.carrier, &p.target.carrier);
    let func = &p.functor;
    if !p.target.ingressives.contains(f) {
        return Err(Error::BaseMismatch(format!("{} is not ingressive", y.morphism_name(f))));
    }
    if func.mor(sigma.right) != f {
        return Err(Error::BaseMismatch(format!(
            "right leg {} does not lie over {}",
            x.morphism_name(sigma.right),
            y.morphism_name(f)
        )));
    }
    let reject = |why: String| Ok(BarwickVerdict { accepted: false, failure: Some(why) });
    let full = Lens::full(func);
    let in_lens = p.ingressive_lens();
    let cocart = full.marks(Direction::Cocartesian);
    let in_cocart = in_lens.marks(Direction::Cocartesian);

    // (1) lifts of every pullback of f along an egressive, from any source
    for g in y.morphism_ids().filter(|&g| p.target.egressives.contains(g) && y.dst(g) == y.dst(f)) {
        let cone = pullback(y, f, g).expect("adequate target");
        let fp = cone.right;
        let (a, b) = (y.src(fp), y.dst(fp));
        for xo in x.objects().filter(|&xo| func.obj(xo) == a) {
            let found = x.out_of(xo).iter().any(|&l| {
                p.source.ingressives.contains(l)
                    && cocart[l]
                    && in_cocart[l]
                    && y.hom(func.obj(x.dst(l)), b).iter().any(|&beta| y.is_iso(beta) && y.compose(beta, func.mor(l)) == fp)
            });
            if !found {
                return reject(format!(
                    "pullback {} of {} has no suitable lift from {}",
                    y.morphism_name(fp),
                    y.morphism_name(f),
                    x.object_name(xo)
                ));
            }
        }
    }

    // (2) squares whose image is an ambigressive pullback
    for g in x.morphism_ids().filter(|&g| func.mor(g) == f && p.source.ingressives.contains(g) && cocart[g]) {
        let (xx, z) = (x.src(g), x.dst(g));
        for phi in x.morphism_ids().filter(|&m| x.dst(m) == xx && p.source.egressives.contains(m)) {
            let xp = x.src(phi);
            let gphi = x.compose(g, phi);
            for &gp in x.out_of(xp).iter().filter(|&&m| p.source.ingressives.contains(m)) {
                let zp = x.dst(gp);
                for &psi in x.hom(zp, z) {
                    if x.compose(psi, gp) != gphi {
                        continue;
                    }
                    if !p.target.is_ambigressive_pullback(func.mor(gp), func.mor(phi), func.mor(psi), f) {
                        continue;
                    }
                    if cocart[gp] != p.source.is_ambigressive_pullback(gp, phi, psi, g) {
                        return reject(format!(
                            "square over {} with top {} breaks the cocartesian/pullback equivalence",
                            y.morphism_name(f),
                            x.morphism_name(gp)
                        ));
                    }
                }
            }
        }
    }

    if !p.egressive_lens().is_cartesian(sigma.left) {
        return reject(format!("left leg {} is not cartesian over egressives", x.morphism_name(sigma.left)));
    }
    if !cocart[sigma.right] {
        return reject(format!("right leg {} is not cocartesian", x.morphism_name(sigma.right)));
    }
    Ok(BarwickVerdict { accepted: true, failure: None })
}

/// A shape for triple maps: a category with two marked classes and the
/// commuting squares that must go to pullbacks.
struct Shape {
    cat: Arc<FinCat>,
    ingressive: Vec<bool>,
    egressive: Vec<bool>,
    squares: Vec<AmbigressiveSquare>,
}

fn twisted_shape(n: usize) -> Shape {
    let tw = tw_simplex_triple(n);
    let t = AdequateTriple::new(tw.carrier.clone(), tw.class("in").clone(), tw.class("eg").clone())
        .expect("twisted simplices form adequate triples");
    Shape {
        squares: t.ambigressive_squares(),
        ingressive: t.ingressives.mask().to_vec(),
        egressive: t.egressives.mask().to_vec(),
        cat: t.carrier,
    }
}

/// Every class-preserving functor from the shape preserving its squares.
fn triple_maps_from(shape: &Shape, t: &AdequateTriple, budget: &mut Budget) -> Result<Vec<FinFunctor>> {
    let filter = |m: Mor, image: Mor| {
        (!shape.ingressive[m] || t.ingressives.contains(image)) && (!shape.egressive[m] || t.egressives.contains(image))
    };
    let spec = SearchSpec { mor_filter: Some(&filter), ..SearchSpec::default() };
    let mut out = Vec::new();
    let mut memo = HashMap::new();
    search_functors(&shape.cat, &t.carrier, &spec, budget, |o, m| {
        let preserved = shape.squares.iter().all(|sq| {
            let key = (m[sq.ingressive], m[sq.egressive], o[sq.cone.apex], m[sq.cone.left], m[sq.cone.right]);
            *memo.entry(key).or_insert_with(|| {
                let cone = Cone { apex: key.2, left: key.3, right: key.4 };
                is_pullback_square(&t.carrier, key.0, key.1, &cone)
            })
        });
        if preserved {
            out.push(FinFunctor::new_unchecked(shape.cat.clone(), t.carrier.clone(), o.to_vec(), m.to_vec()));
        }
        true
    })?;
    Ok(out)
}

/// `Q_n(T)`: the full subcategory of functors `Tw([n]) -> T` on triple maps.
pub fn q_category(n: usize, t: &AdequateTriple) -> Result<FunctorCategory> {
    q_category_with_budget(n, t, &mut Budget::global())
}

pub fn q_category_with_budget(n: usize, t: &AdequateTriple, budget: &mut Budget) -> Result<FunctorCategory> {
    Ok(FunctorCategory::new(triple_maps_from(&twisted_shape(n), t, budget)?))
}

/// The functor `Tw([m]) -> Tw([n])` induced by a monotone map `[m] -> [n]`.
fn twisted_map(m: usize, n: usize, delta: &[usize]) -> FinFunctor {
    let src = tw_simplex_triple(m).carrier;
    let dst = tw_simplex_triple(n).carrier;
    let mut obj = vec![0; src.num_objects()];
    for i in 0..=m {
        for j in i..=m {
            obj[tw_index(m, i, j)] = tw_index(n, delta[i], delta[j]);
        }
    }
    FinFunctor::into_thin(src, dst, obj).expect("monotone maps induce functors")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegalReport {
    /// Per `n`, whether restriction to the spine zig-zag is an equivalence.
    pub segal: Vec<(usize, bool)>,
    /// Whether `Q_0` is equivalent to the diagrams in `Q_3` degenerate along
    /// both long edges, when `max_n >= 3`.
    pub complete: Option<bool>,
}

impl SegalReport {
    pub fn passed(&self) -> bool {
        self.segal.iter().all(|&(_, ok)| ok) && self.complete != Some(false)
    }
}

pub fn segal_completeness_check(t: &AdequateTriple, max_n: usize) -> Result<SegalReport> {
    let mut budget = Budget::global();
    let mut qs = Vec::new();
    let mut segal = Vec::new();
    for n in 0..=max_n {
        let shape = twisted_shape(n);
        let q = triple_maps_from(&shape, t, &mut budget)?;
        segal.push((n, spine_restriction_is_equivalence(n, &shape, &q, t, &mut budget)?));
        qs.push(q);
    }
    let complete = if max_n >= 3 { Some(completeness(&qs[0], &qs[3])) } else { None };
    Ok(SegalReport { segal, complete })
}

/// Restriction from `Q_n(T)` to the functors on the spine zig-zag
/// `(i<=i+1) -> (i<=i)`, `(i<=i+1) -> (i+1<=i+1)` sending the first kind of
/// arrow to egressives and the second to ingressives, as the twisted simplex
/// itself does.
fn spine_restriction_is_equivalence(
    n: usize,
    tw: &Shape,
    q: &[FinFunctor],
    t: &AdequateTriple,
    budget: &mut Budget,
) -> Result<bool> {
    let keep: Vec<Obj> = tw
        .cat
        .objects()
        .filter(|&o| {
            let (i, j) = interval(n, o);
            j <= i + 1
        })
        .collect();
    let (spine, mors) = tw.cat.full_subcategory(&keep);
    let spine = Arc::new(spine);
    let shape = Shape {
        ingressive: mors.iter().map(|&m| tw.ingressive[m]).collect(),
        egressive: mors.iter().map(|&m| tw.egressive[m]).collect(),
        squares: Vec::new(),
        cat: spine.clone(),
    };
    let inclusion = FinFunctor::new(spine, tw.cat.clone(), keep, mors)?;
    let j = triple_maps_from(&shape, t, budget)?;
    Ok(precomposition_is_equivalence(q, &j, &inclusion))
}

/// Whether `F ↦ F ∘ h` is an equivalence between the full subcategories of
/// functor categories on `from` and on `to`.
pub fn precomposition_is_equivalence(from: &[FinFunctor], to: &[FinFunctor], h: &FinFunctor) -> bool {
    let x = match from.first().or(to.first()) {
        Some(f) => f.target().clone(),
        None => return true,
    };
    if !x.is_thin() {
        let (a, b) = (FunctorCategory::new(from.to_vec()), FunctorCategory::new(to.to_vec()));
        return a.restriction(h, &b).is_some_and(|r| is_equivalence(&r));
    }
    // Into a thin category a functor is its object map, transformations
    // exist exactly when every component does, and naturality is automatic.
    let le = |a: &[Obj], b: &[Obj]| a.iter().zip(b).all(|(&u, &v)| !x.hom(u, v).is_empty());
    let index: HashMap<&[Obj], usize> = to.iter().enumerate().map(|(i, g)| (g.object_map(), i)).collect();
    let mut image = Vec::with_capacity(from.len());
    for f in from {
        let restricted: Vec<Obj> = h.object_map().iter().map(|&o| f.obj(o)).collect();
        match index.get(restricted.as_slice()) {
            Some(&i) => image.push(i),
            None => return false,
        }
    }
    let full = from.iter().enumerate().all(|(a, fa)| {
        from.iter().enumerate().all(|(b, fb)| {
            !le(to[image[a]].object_map(), to[image[b]].object_map()) || le(fa.object_map(), fb.object_map())
        })
    });
    let surjective = to.iter().all(|g| {
        image.iter().any(|&i| {
            let gi = to[i].object_map();
            le(gi, g.object_map()) && le(g.object_map(), gi)
        })
    });
    full && surjective
}

fn interval(n: usize, o: Obj) -> (usize, usize) {
    (0..=n)
        .flat_map(|i| (i..=n).map(move |j| (i, j)))
        .find(|&(i, j)| tw_index(n, i, j) == o)
        .expect("object of a twisted simplex")
}

/// `Q_0` against the diagrams in `Q_3` that are constant along both
/// `d_{02}` and `d_{13}`. Naturality forces transformations between
/// constant diagrams on a connected shape to be constant, so the strict
/// pullback is a full subcategory.
fn completeness(q0: &[FinFunctor], q3: &[FinFunctor]) -> bool {
    let d02 = twisted_map(1, 3, &[0, 2]);
    let d13 = twisted_map(1, 3, &[1, 3]);
    let constant_on = |f: &FinFunctor, d: &FinFunctor| {
        let g = f.after(d);
        g.object_map().iter().all(|&o| o == g.obj(0)) && g.source().morphism_ids().all(|m| g.target().is_identity(g.mor(m)))
    };
    let degenerate: Vec<FinFunctor> =
        q3.iter().filter(|f| constant_on(f, &d02) && constant_on(f, &d13)).cloned().collect();
    let collapse = twisted_map(3, 0, &[0, 0, 0, 0]);
    precomposition_is_equivalence(q0, &degenerate, &collapse)
}

/// One poset on `n` points from each isomorphism class, each labelled so
/// that its order extends the natural one.
pub fn posets_up_to_iso(n: usize) -> Vec<Arc<FinCat>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let bit = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).expect("distinct points");
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for bits in 0u32..(1 << upper.len()) {
        let rel = |a: usize, b: usize| a == b || upper.iter().position(|&p| p == (a, b)).is_some_and(|k| bits >> k & 1 == 1);
        let transitive = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(rel(a, b) && rel(b, c)) || rel(a, c))));
        if !transitive {
            continue;
        }
        let code = |perm: &[usize]| -> u64 {
            upper
                .iter()
                .filter(|&&(a, b)| rel(a, b))
                .map(|&(a, b)| 1u64 << bit(perm[a], perm[b]))
                .sum()
        };
        let canonical = perms.iter().map(|p| code(p)).min().unwrap_or(0);
        if seen.insert(canonical) {
            let names = (0..n).map(|i| format!("x{i}")).collect();
            out.push(Arc::new(FinCat::preorder(names, rel).expect("transitive relation")));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every wide subcategory of a poset (every transitive set of strict
/// relations together with the identities).
pub fn poset_wide_subcategories(c: &Arc<FinCat>) -> Vec<WideSubcat> {
    let strict: Vec<Mor> = c.morphism_ids().filter(|&m| !c.is_identity(m)).collect();
    assert!(strict.len() < 24, "too many arrows to enumerate subsets");
    let mut out = Vec::new();
    for bits in 0u32..(1 << strict.len()) {
        let members: Vec<Mor> = (0..strict.len()).filter(|&k| bits >> k & 1 == 1).map(|k| strict[k]).collect();
        if let Ok(w) = WideSubcat::new(c.clone(), members) {
            out.push(w);
        }
    }
    out
}

/// Every adequate triple on a poset.
pub fn poset_triples(c: &Arc<FinCat>) -> Vec<AdequateTriple> {
    let subs = poset_wide_subcategories(c);
    let mut out = Vec::new();
    for ing in &subs {
        for eg in &subs {
            if validate_triple(c, ing, eg).valid {
                out.push(AdequateTriple { carrier: c.clone(), ingressives: ing.clone(), egressives: eg.clone() });
            }
        }
    }
    out
}

/// `[1] × [1]` with objects `00, 10, 01, 11`, where the first coordinate
/// moves horizontally.
pub fn square() -> Arc<FinCat> {
    let s = Arc::new(simplex(1));
    product(&s, &s).cat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{equivalent_categories, opposite};

    fn chain(n: usize) -> Arc<FinCat> {
        Arc::new(simplex(n))
    }

    fn vee() -> Arc<FinCat> {
        let names = vec!["x".to_string(), "y".into(), "z".into()];
        Arc::new(FinCat::preorder(names, |a, b| a == b || b == 2).unwrap())
    }

    #[test]
    fn maximal_triples_need_pullbacks() {
        assert!(AdequateTriple::maximal(&chain(1)).is_ok());
        assert!(AdequateTriple::maximal(&square()).is_ok());
        let v = vee();
        let all = WideSubcat::all(v.clone());
        let report = validate_triple(&v, &all, &all);
        assert!(!report.valid);
        let (x, y, z) = (0, 1, 2);
        let xz = v.arrow(x, z).unwrap();
        let yz = v.arrow(y, z).unwrap();
        assert!(report.counterexamples.contains(&Counterexample { ingressive: xz, egressive: yz, reason: "no pullback" }));
    }

    #[test]
    fn isomorphism_classes_are_always_adequate() {
        for c in [chain(2), vee(), Arc::new(FinCat::walking_iso())] {
            for w in poset_wide_subcategories_or_all(&c) {
                let iota = crate::fincat::core(&c);
                assert!(validate_triple(&c, &iota, &w).valid);
                assert!(validate_triple(&c, &w, &iota).valid);
            }
        }
    }

    fn poset_wide_subcategories_or_all(c: &Arc<FinCat>) -> Vec<WideSubcat> {
        if c.is_poset() {
            poset_wide_subcategories(c)
        } else {
            vec![WideSubcat::all(c.clone())]
        }
    }

    #[test]
    fn perp_triples_unfold() {
        let t = perp_triple(&chain(1), &chain(0));
        assert_eq!(t.ingressives.len(), 3);
        assert_eq!(t.egressives.len(), 2);
        let sq = perp_triple(&chain(1), &chain(1));
        let c = &sq.carrier;
        // horizontal arrows move the first coordinate
        let h = c.arrow(0, 2).unwrap();
        let v = c.arrow(0, 1).unwrap();
        assert_eq!((c.object_name(0), c.object_name(1), c.object_name(2)), ("(0,0)", "(0,1)", "(1,0)"));
        assert!(sq.ingressives.contains(h) && !sq.egressives.contains(h));
        assert!(sq.egressives.contains(v) && !sq.ingressives.contains(v));
        let rev = reverse_triple(&sq).unwrap();
        assert_eq!(rev.ingressives, sq.egressives);
        assert_eq!(reverse_triple(&rev).unwrap().ingressives, sq.ingressives);
    }

    #[test]
    fn endomorphisms_in_the_maximal_square() {
        let t = AdequateTriple::maximal(&square()).unwrap();
        let s = span_homotopy_category(&t).unwrap();
        let top = 3;
        assert_eq!(s.cat.hom(top, top).len(), 4);
        assert!(s.automorphisms_trivial());
    }

    #[test]
    fn spans_of_perp_triples_are_products_with_opposites() {
        let walking = Arc::new(FinCat::walking_iso());
        for (a, b) in [(chain(1), chain(1)), (chain(2), vee()), (walking.clone(), chain(1)), (chain(1), walking)] {
            let s = span_homotopy_category(&perp_triple(&a, &b)).unwrap();
            let expected = product(&a, &Arc::new(opposite(&b))).cat;
            assert!(equivalent_categories(&s.cat, &expected).unwrap().is_some());
            assert!(perp_span_isomorphism(&a, &b, &s).unwrap().is_isomorphism());
        }
    }

    #[test]
    fn reversal_opposes_spans() {
        let t = AdequateTriple::maximal(&square()).unwrap();
        let s = span_homotopy_category(&t).unwrap();
        let r = span_homotopy_category(&reverse_triple(&t).unwrap()).unwrap();
        assert!(equivalent_categories(&r.cat, &Arc::new(opposite(&s.cat))).unwrap().is_some());
    }

    #[test]
    fn q1_of_the_interval_with_invertible_egressives() {
        let c = chain(1);
        let t = AdequateTriple::new(c.clone(), WideSubcat::all(c.clone()), crate::fincat::core(&c)).unwrap();
        assert_eq!(q_category(1, &t).unwrap().cat.num_objects(), 3);
    }

    #[test]
    fn segal_and_completeness_for_small_triples() {
        let point = chain(0);
        let terminal = AdequateTriple::maximal(&point).unwrap();
        for n in 0..=3 {
            assert_eq!(q_category(n, &terminal).unwrap().cat.num_morphisms(), 1);
        }
        assert!(segal_completeness_check(&terminal, 3).unwrap().passed());
        let sq = perp_triple(&chain(1), &chain(1));
        assert!(segal_completeness_check(&sq, 3).unwrap().passed());
    }

    #[test]
    fn fibration_triples() {
        let c = chain(1);
        let id = FinFunctor::identity(&c);
        let base = AdequateTriple::new(c.clone(), crate::fincat::core(&c), WideSubcat::all(c.clone())).unwrap();
        let t = triple_from_fibration(&id, &base).unwrap();
        assert_eq!(t.egressives, base.egressives);
        // the inclusion of the top object has no cartesian lift of 0 -> 1
        let top = Arc::new(simplex(0));
        let incl = FinFunctor::into_thin(top, c.clone(), vec![1]).unwrap();
        assert!(matches!(triple_from_fibration(&incl, &base), Err(Error::MissingCartesianLifts(_))));
    }

    #[test]
    fn barwick_counterexample_is_rejected() {
        let x = square();
        let (c00, c01, c10, c11) = (0, 1, 2, 3);
        let h = [x.arrow(c00, c10).unwrap(), x.arrow(c01, c11).unwrap()];
        let src = AdequateTriple::from_members(
            x.clone(),
            h,
            x.morphism_ids().filter(|m| !h.contains(m)).collect::<Vec<_>>(),
        )
        .unwrap();
        let tgt = AdequateTriple::from_members(x.clone(), h, x.morphism_ids().collect::<Vec<_>>()).unwrap();
        let p = TripleMap::new(FinFunctor::identity(&x), src, tgt).unwrap();
        let phi = x.arrow(c10, c11).unwrap();
        let sigma = SpanMor { source: c11, target: c10, apex: c10, left: phi, right: x.id(c10) };
        let verdict = barwick_cocartesian_test(&p, &sigma, x.id(c10)).unwrap();
        assert!(!verdict.accepted);
        assert!(verdict.failure.unwrap().contains("left leg"));
        let degenerate = SpanMor { source: c00, target: c00, apex: c00, left: x.id(c00), right: x.id(c00) };
        assert!(barwick_cocartesian_test(&p, &degenerate, x.id(c00)).unwrap().accepted);
        assert!(matches!(barwick_cocartesian_test(&p, &degenerate, x.id(c11)), Err(Error::BaseMismatch(_))));
    }
}
