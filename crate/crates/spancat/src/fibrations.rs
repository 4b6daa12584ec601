//! Detection of (locally) cartesian and cocartesian edges, sufficient
//! supplies of lifts, and classification of functors `p: X -> A × B`.
//!
//! Lifts are taken up to isomorphism: a cartesian lift of `e: s -> s'` at
//! `x` over `s'` is a cartesian edge `f: y -> x` together with an iso
//! `α: s -> p(y)` such that `p(f) ∘ α = e`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{product, FinCat, FinFunctor, Mor, Obj, Product, WideSubcat};
use crate::shapes::Flavor;
use crate::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Cartesian,
    Cocartesian,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeType {
    pub cartesian: bool,
    pub cocartesian: bool,
    pub locally_cartesian: bool,
    pub locally_cocartesian: bool,
}

/// A functor viewed through a wide subcategory of its base: only arrows of
/// the total category lying over the subcategory are visible.
#[derive(Clone)]
pub struct Lens<'a> {
    pub p: &'a FinFunctor,
    smask: Option<Vec<bool>>,
    xmask: Vec<bool>,
}

impl<'a> Lens<'a> {
    pub fn full(p: &'a FinFunctor) -> Self {
        Lens { p, smask: None, xmask: vec![true; p.source().num_morphisms()] }
    }

    pub fn restricted(p: &'a FinFunctor, base_mask: Vec<bool>) -> Self {
        let xmask = (0..p.source().num_morphisms()).map(|f| base_mask[p.mor(f)]).collect();
        Lens { p, smask: Some(base_mask), xmask }
    }

    /// Only base arrows in `base_mask` and total arrows in `total_mask` are
    /// visible, as for the restriction of `p` to a pair of wide subcategories.
    pub fn masked(p: &'a FinFunctor, base_mask: Vec<bool>, total_mask: Vec<bool>) -> Self {
        Lens { p, smask: Some(base_mask), xmask: total_mask }
    }

    fn s_ok(&self, u: Mor) -> bool {
        self.smask.as_ref().is_none_or(|m| m[u])
    }

    pub fn visible(&self, f: Mor) -> bool {
        self.xmask[f]
    }

    fn x(&self) -> &FinCat {
        self.p.source()
    }

    fn s(&self) -> &FinCat {
        self.p.target()
    }

    /// `f: y -> z` is cartesian: for every `w`, `g ↦ (f∘g, p g)` is a
    /// bijection onto the fiber product of hom-sets.
    pub fn is_cartesian(&self, f: Mor) -> bool {
        let (x, s, p) = (self.x(), self.s(), self.p);
        let (y, z) = (x.src(f), x.dst(f));
        let pf = p.mor(f);
        x.objects().all(|w| {
            let (pw, py) = (p.obj(w), p.obj(y));
            x.hom(w, z).iter().filter(|&&h| self.visible(h)).all(|&h| {
                s.hom(pw, py)
                    .iter()
                    .filter(|&&u| self.s_ok(u) && s.compose(pf, u) == p.mor(h))
                    .all(|&u| {
                        x.hom(w, y)
                            .iter()
                            .filter(|&&g| self.visible(g) && p.mor(g) == u && x.compose(f, g) == h)
                            .count()
                            == 1
                    })
            })
        })
    }

    /// `f: x -> y` is cocartesian: for every `z`, `g ↦ (g∘f, p g)` is a
    /// bijection onto the fiber product of hom-sets.
    pub fn is_cocartesian(&self, f: Mor) -> bool {
        let (x, s, p) = (self.x(), self.s(), self.p);
        let (a, y) = (x.src(f), x.dst(f));
        let pf = p.mor(f);
        x.objects().all(|z| {
            let (py, pz) = (p.obj(y), p.obj(z));
            x.hom(a, z).iter().filter(|&&h| self.visible(h)).all(|&h| {
                s.hom(py, pz)
                    .iter()
                    .filter(|&&u| self.s_ok(u) && s.compose(u, pf) == p.mor(h))
                    .all(|&u| {
                        x.hom(y, z)
                            .iter()
                            .filter(|&&g| self.visible(g) && p.mor(g) == u && x.compose(g, f) == h)
                            .count()
                            == 1
                    })
            })
        })
    }

    /// Cartesian for the pullback of `p` along `p(f): [1] -> S`.
    pub fn is_locally_cartesian(&self, f: Mor) -> bool {
        let (x, s, p) = (self.x(), self.s(), self.p);
        let (y, z) = (x.src(f), x.dst(f));
        let (e, idy) = (p.mor(f), s.id(p.obj(y)));
        x.objects().filter(|&w| p.obj(w) == p.obj(y)).all(|w| {
            x.hom(w, z).iter().filter(|&&h| p.mor(h) == e).all(|&h| {
                x.hom(w, y)
                    .iter()
                    .filter(|&&g| p.mor(g) == idy && x.compose(f, g) == h)
                    .count()
                    == 1
            })
        })
    }

    pub fn is_locally_cocartesian(&self, f: Mor) -> bool {
        let (x, s, p) = (self.x(), self.s(), self.p);
        let (a, y) = (x.src(f), x.dst(f));
        let (e, idy) = (p.mor(f), s.id(p.obj(y)));
        x.objects().filter(|&z| p.obj(z) == p.obj(y)).all(|z| {
            x.hom(a, z).iter().filter(|&&h| p.mor(h) == e).all(|&h| {
                x.hom(y, z)
                    .iter()
                    .filter(|&&g| p.mor(g) == idy && x.compose(g, f) == h)
                    .count()
                    == 1
            })
        })
    }

    /// Per-edge flags for every visible edge (invisible edges read false).
    pub fn marks(&self, dir: Direction) -> Vec<bool> {
        self.x()
            .morphism_ids()
            .map(|f| {
                self.visible(f)
                    && match dir {
                        Direction::Cartesian => self.is_cartesian(f),
                        Direction::Cocartesian => self.is_cocartesian(f),
                    }
            })
            .collect()
    }

    /// Pairs `(e, x)` of a base edge in `emask` and an object at the relevant
    /// endpoint that admit no lift of the requested kind.
    pub fn missing_lifts(&self, emask: &[bool], dir: Direction, marks: &[bool]) -> Vec<(Mor, Obj)> {
        let (x, s, p) = (self.x(), self.s(), self.p);
        let mut missing = Vec::new();
        for e in s.morphism_ids().filter(|&e| emask[e] && self.s_ok(e)) {
            let (s0, s1) = (s.src(e), s.dst(e));
            match dir {
                Direction::Cartesian => {
                    for xo in x.objects().filter(|&xo| p.obj(xo) == s1) {
                        let found = x.morphism_ids().any(|f| {
                            marks[f]
                                && x.dst(f) == xo
                                && s.hom(s0, p.obj(x.src(f)))
                                    .iter()
                                    .any(|&a| s.is_iso(a) && s.compose(p.mor(f), a) == e)
                        });
                        if !found {
                            missing.push((e, xo));
                        }
                    }
                }
                Direction::Cocartesian => {
                    for xo in x.objects().filter(|&xo| p.obj(xo) == s0) {
                        let found = x.out_of(xo).iter().any(|&f| {
                            marks[f]
                                && s.hom(p.obj(x.dst(f)), s1)
                                    .iter()
                                    .any(|&b| s.is_iso(b) && s.compose(b, p.mor(f)) == e)
                        });
                        if !found {
                            missing.push((e, xo));
                        }
                    }
                }
            }
        }
        missing
    }
}

pub fn edge_type(p: &FinFunctor, f: Mor) -> EdgeType {
    let l = Lens::full(p);
    EdgeType {
        cartesian: l.is_cartesian(f),
        cocartesian: l.is_cocartesian(f),
        locally_cartesian: l.is_locally_cartesian(f),
        locally_cocartesian: l.is_locally_cocartesian(f),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCheck {
    pub ok: bool,
    /// `(base edge, object)` pairs without a lift.
    pub missing: Vec<(Mor, Obj)>,
}

pub fn has_sufficient_lifts(p: &FinFunctor, e: &WideSubcat, dir: Direction) -> LiftCheck {
    assert_eq!(**e.parent(), **p.target(), "subcategory of a different base");
    let l = Lens::full(p);
    let marks = l.marks(dir);
    let missing = l.missing_lifts(e.mask(), dir, &marks);
    LiftCheck { ok: missing.is_empty(), missing }
}

pub fn is_cartesian_fibration(p: &FinFunctor) -> bool {
    let l = Lens::full(p);
    let all = vec![true; p.target().num_morphisms()];
    l.missing_lifts(&all, Direction::Cartesian, &l.marks(Direction::Cartesian)).is_empty()
}

pub fn is_cocartesian_fibration(p: &FinFunctor) -> bool {
    let l = Lens::full(p);
    let all = vec![true; p.target().num_morphisms()];
    l.missing_lifts(&all, Direction::Cocartesian, &l.marks(Direction::Cocartesian)).is_empty()
}

/// A functor into a product `A × B` with the data needed for the taxonomy.
#[derive(Clone)]
pub struct FibredFunctor {
    pub proj: FinFunctor,
    pub base: Product,
}

impl fmt::Debug for FibredFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FibredFunctor({:?} over {:?} x {:?})", self.total(), self.base_a(), self.base_b())
    }
}

impl FibredFunctor {
    pub fn new(proj: FinFunctor, base: Product) -> Result<Self> {
        if **proj.target() != *base.cat {
            return Err(Error::BaseMismatch("projection does not land in the product".into()));
        }
        let proj = proj.with_categories(proj.source().clone(), base.cat.clone());
        Ok(FibredFunctor { proj, base })
    }

    /// Identity of `A × B`.
    pub fn identity(a: &Arc<FinCat>, b: &Arc<FinCat>) -> Self {
        let base = product(a, b);
        FibredFunctor { proj: FinFunctor::identity(&base.cat), base }
    }

    pub fn total(&self) -> &Arc<FinCat> {
        self.proj.source()
    }

    pub fn base_a(&self) -> &Arc<FinCat> {
        self.base.first.target()
    }

    pub fn base_b(&self) -> &Arc<FinCat> {
        self.base.second.target()
    }

    /// `p_1 = pr_A ∘ p`.
    pub fn p1(&self) -> FinFunctor {
        self.base.first.after(&self.proj)
    }

    /// `p_2 = pr_B ∘ p`.
    pub fn p2(&self) -> FinFunctor {
        self.base.second.after(&self.proj)
    }

    /// Base arrows in `A × ιB`.
    pub fn a_direction(&self) -> Vec<bool> {
        let b = self.base_b();
        (0..self.base.cat.num_morphisms()).map(|m| b.is_iso(self.base.second.mor(m))).collect()
    }

    /// Base arrows in `ιA × B`.
    pub fn b_direction(&self) -> Vec<bool> {
        let a = self.base_a();
        (0..self.base.cat.num_morphisms()).map(|m| a.is_iso(self.base.first.mor(m))).collect()
    }

    /// Total-category arrows whose A-component is invertible.
    pub fn a_iso(&self, f: Mor) -> bool {
        self.base_a().is_iso(self.base.first.mor(self.proj.mor(f)))
    }

    pub fn b_iso(&self, f: Mor) -> bool {
        self.base_b().is_iso(self.base.second.mor(self.proj.mor(f)))
    }

    /// `p_l`: the restriction over `A × ιB`.
    pub fn left(&self) -> Lens<'_> {
        Lens::restricted(&self.proj, self.a_direction())
    }

    /// `p_r`: the restriction over `ιA × B`.
    pub fn right(&self) -> Lens<'_> {
        Lens::restricted(&self.proj, self.b_direction())
    }

    pub fn full(&self) -> Lens<'_> {
        Lens::full(&self.proj)
    }

    /// The same functor over `B × A`.
    pub fn swapped(&self) -> FibredFunctor {
        let base = product(self.base_b(), self.base_a());
        let (pa, pb) = (self.p1(), self.p2());
        let x = self.total();
        let proj = FinFunctor::new(
            x.clone(),
            base.cat.clone(),
            x.objects().map(|o| base.pair_obj(pb.obj(o), pa.obj(o))).collect(),
            x.morphism_ids().map(|m| base.pair_mor(pb.mor(m), pa.mor(m))).collect(),
        )
        .expect("swapped projection");
        FibredFunctor { proj, base }
    }

    /// The opposite functor `X^op -> A^op × B^op`.
    pub fn opposite(&self) -> FibredFunctor {
        let a = Arc::new(crate::fincat::opposite(self.base_a()));
        let b = Arc::new(crate::fincat::opposite(self.base_b()));
        let base = product(&a, &b);
        let x = Arc::new(crate::fincat::opposite(self.total()));
        let proj = FinFunctor::new(x, base.cat.clone(), self.proj.object_map().to_vec(), self.proj.morphism_map().to_vec())
            .expect("opposite projection");
        FibredFunctor { proj, base }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// No lift of this base edge at this object of the total category.
    MissingLift { base_edge: Mor, object: Obj },
    /// An offending edge of the total category.
    Edge(Mor),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FibrationReport {
    pub cocart_over_a: bool,
    pub cart_over_b: bool,
    pub cocart_over_b: bool,
    pub cart_over_a: bool,
    pub local_ortho: bool,
    pub ortho: bool,
    pub gray: bool,
    pub gray_op: bool,
    pub cocartesian_fibration: bool,
    pub cartesian_fibration: bool,
    pub left_fib: bool,
    pub right_fib: bool,
    pub bifib: bool,
    pub conservative: bool,
    /// Witnesses for each false flag, keyed by flag name.
    pub witnesses: Vec<(&'static str, Vec<Witness>)>,
}

impl FibrationReport {
    pub fn flags(&self) -> [(&'static str, bool); 13] {
        [
            ("cocartOverA", self.cocart_over_a),
            ("cartOverB", self.cart_over_b),
            ("cocartOverB", self.cocart_over_b),
            ("cartOverA", self.cart_over_a),
            ("localOrtho", self.local_ortho),
            ("ortho", self.ortho),
            ("gray", self.gray),
            ("grayOp", self.gray_op),
            ("cocartesianFibration", self.cocartesian_fibration),
            ("cartesianFibration", self.cartesian_fibration),
            ("leftFib", self.left_fib),
            ("rightFib", self.right_fib),
            ("bifib", self.bifib),
        ]
    }

    pub fn witnesses_for(&self, flag: &str) -> &[Witness] {
        self.witnesses.iter().find(|(k, _)| *k == flag).map_or(&[], |(_, w)| w)
    }

    /// The implications every report must satisfy.
    pub fn implications_hold(&self) -> bool {
        let imp = |a: bool, b: bool| !a || b;
        imp(self.bifib, self.ortho)
            && imp(self.ortho, self.local_ortho)
            && imp(self.local_ortho, self.cocart_over_a && self.cart_over_b)
            && imp(self.cocartesian_fibration, self.gray)
            && imp(self.cartesian_fibration, self.gray_op)
            && imp(self.left_fib, self.cocartesian_fibration)
            && imp(self.right_fib, self.cartesian_fibration)
            && imp(self.gray, self.cocart_over_b)
            && imp(self.gray_op, self.cart_over_b)
            && self.flags().iter().all(|(k, v)| *v || !self.witnesses_for(k).is_empty())
    }
}

fn lift_witnesses(missing: Vec<(Mor, Obj)>) -> Vec<Witness> {
    missing.into_iter().map(|(base_edge, object)| Witness::MissingLift { base_edge, object }).collect()
}

/// Every cached edge mark a classification needs.
pub struct Marks {
    pub cart: Vec<bool>,
    pub cocart: Vec<bool>,
    pub left_cart: Vec<bool>,
    pub left_cocart: Vec<bool>,
    pub right_cart: Vec<bool>,
    pub right_cocart: Vec<bool>,
}

impl Marks {
    pub fn compute(p: &FibredFunctor) -> Marks {
        let (full, left, right) = (p.full(), p.left(), p.right());
        Marks {
            cart: full.marks(Direction::Cartesian),
            cocart: full.marks(Direction::Cocartesian),
            left_cart: left.marks(Direction::Cartesian),
            left_cocart: left.marks(Direction::Cocartesian),
            right_cart: right.marks(Direction::Cartesian),
            right_cocart: right.marks(Direction::Cocartesian),
        }
    }
}

pub fn classify(p: &FibredFunctor) -> FibrationReport {
    let marks = Marks::compute(p);
    let full = p.full();
    let all = vec![true; p.base.cat.num_morphisms()];
    let (adir, bdir) = (p.a_direction(), p.b_direction());
    let mut r = FibrationReport::default();
    let mut w: Vec<(&'static str, Vec<Witness>)> = Vec::new();

    let m = full.missing_lifts(&adir, Direction::Cocartesian, &marks.cocart);
    r.cocart_over_a = m.is_empty();
    w.push(("cocartOverA", lift_witnesses(m)));
    let m = full.missing_lifts(&bdir, Direction::Cartesian, &marks.cart);
    r.cart_over_b = m.is_empty();
    w.push(("cartOverB", lift_witnesses(m)));
    let m = full.missing_lifts(&bdir, Direction::Cocartesian, &marks.cocart);
    r.cocart_over_b = m.is_empty();
    w.push(("cocartOverB", lift_witnesses(m)));
    let m = full.missing_lifts(&adir, Direction::Cartesian, &marks.cart);
    r.cart_over_a = m.is_empty();
    w.push(("cartOverA", lift_witnesses(m)));

    let m_cocart = full.missing_lifts(&all, Direction::Cocartesian, &marks.cocart);
    r.cocartesian_fibration = m_cocart.is_empty();
    let m_cart = full.missing_lifts(&all, Direction::Cartesian, &marks.cart);
    r.cartesian_fibration = m_cart.is_empty();

    let left = p.left();
    let m_left = left.missing_lifts(&adir, Direction::Cocartesian, &marks.left_cocart);
    let m_left_cart = left.missing_lifts(&adir, Direction::Cartesian, &marks.left_cart);

    r.local_ortho = r.cocart_over_a && r.cart_over_b;
    let mut lo = w[0].1.clone();
    lo.extend(w[1].1.clone());
    w.push(("localOrtho", lo));

    r.gray = r.cocart_over_b && m_left.is_empty();
    let mut g = w[2].1.clone();
    g.extend(lift_witnesses(m_left));
    w.push(("gray", g));

    r.gray_op = r.cart_over_b && m_left_cart.is_empty();
    let mut g = w[1].1.clone();
    g.extend(lift_witnesses(m_left_cart));
    w.push(("grayOp", g));

    r.ortho = false;
    let ortho_w = if r.local_ortho {
        let edges = interpolating_edges_with(p, Flavor::Ortho, &marks);
        let bad: Vec<Witness> = edges.into_iter().filter(|&e| !p.total().is_iso(e)).map(Witness::Edge).collect();
        r.ortho = bad.is_empty();
        bad
    } else {
        w[4].1.clone()
    };
    w.push(("ortho", ortho_w));

    w.push(("cocartesianFibration", lift_witnesses(m_cocart.clone())));
    w.push(("cartesianFibration", lift_witnesses(m_cart.clone())));

    let x = p.total();
    let non_cocart: Vec<Witness> = x.morphism_ids().filter(|&f| !marks.cocart[f]).map(Witness::Edge).collect();
    let non_cart: Vec<Witness> = x.morphism_ids().filter(|&f| !marks.cart[f]).map(Witness::Edge).collect();
    r.left_fib = r.cocartesian_fibration && non_cocart.is_empty();
    r.right_fib = r.cartesian_fibration && non_cart.is_empty();
    let mut lw = lift_witnesses(m_cocart);
    lw.extend(non_cocart);
    w.push(("leftFib", lw));
    let mut rw = lift_witnesses(m_cart);
    rw.extend(non_cart);
    w.push(("rightFib", rw));

    let non_conservative: Vec<Witness> = x
        .morphism_ids()
        .filter(|&f| p.base.cat.is_iso(p.proj.mor(f)) && !x.is_iso(f))
        .map(Witness::Edge)
        .collect();
    r.conservative = non_conservative.is_empty();
    r.bifib = r.local_ortho && r.conservative;
    let mut bw = w[4].1.clone();
    bw.extend(non_conservative);
    w.push(("bifib", bw));

    let flags = r.flags();
    r.witnesses = w
        .into_iter()
        .filter(|(k, _)| flags.iter().any(|(n, v)| n == k && !v))
        .collect();
    r
}

fn interpolating_edges_with(p: &FibredFunctor, flavor: Flavor, marks: &Marks) -> Vec<Mor> {
    let x = p.total();
    let base = &p.base.cat;
    let mut found = Vec::new();
    match flavor {
        Flavor::Gray => {
            // 0→1, 3→4 p-cocartesian over A-isos; 1→2, 0→3 p_l-cocartesian over B-isos.
            for a in x.morphism_ids().filter(|&f| marks.cocart[f] && p.a_iso(f)) {
                let x0 = x.src(a);
                for &d in x.out_of(x0).iter().filter(|&&f| marks.left_cocart[f] && p.b_iso(f)) {
                    let x3 = x.dst(d);
                    for &b in x.out_of(x.dst(a)).iter().filter(|&&f| marks.left_cocart[f] && p.b_iso(f)) {
                        let x2 = x.dst(b);
                        let ba = x.compose(b, a);
                        for &e in x.out_of(x3).iter().filter(|&&f| marks.cocart[f] && p.a_iso(f)) {
                            let ed = x.compose(e, d);
                            for &c in x.hom(x2, x.dst(e)) {
                                if base.is_iso(p.proj.mor(c)) && x.compose(c, ba) == ed {
                                    found.push(c);
                                }
                            }
                        }
                    }
                }
            }
        }
        Flavor::Ortho => {
            // 1→0, 4→3 p-cartesian over A-isos; 1→2, 0→3 p-cocartesian over B-isos.
            for k in x.morphism_ids().filter(|&f| marks.cart[f] && p.a_iso(f)) {
                let (x1, x0) = (x.src(k), x.dst(k));
                for &m in x.out_of(x0).iter().filter(|&&f| marks.cocart[f] && p.b_iso(f)) {
                    let x3 = x.dst(m);
                    let mk = x.compose(m, k);
                    for &b in x.out_of(x1).iter().filter(|&&f| marks.cocart[f] && p.b_iso(f)) {
                        let x2 = x.dst(b);
                        for e in x.morphism_ids().filter(|&f| x.dst(f) == x3 && marks.cart[f] && p.a_iso(f)) {
                            for &c in x.hom(x2, x.src(e)) {
                                if base.is_iso(p.proj.mor(c)) && x.compose(e, x.compose(c, b)) == mk {
                                    found.push(c);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found.dedup();
    found
}

/// Evaluations at `2 -> 4` of all interpolating diagrams of the given
/// flavor, sorted and without repetition.
pub fn interpolating_edges(p: &FibredFunctor, flavor: Flavor) -> Result<Vec<Mor>> {
    let marks = Marks::compute(p);
    let full = p.full();
    let (adir, bdir) = (p.a_direction(), p.b_direction());
    let ready = match flavor {
        Flavor::Gray => {
            full.missing_lifts(&bdir, Direction::Cocartesian, &marks.cocart).is_empty()
                && p.left().missing_lifts(&adir, Direction::Cocartesian, &marks.left_cocart).is_empty()
        }
        Flavor::Ortho => {
            full.missing_lifts(&adir, Direction::Cocartesian, &marks.cocart).is_empty()
                && full.missing_lifts(&bdir, Direction::Cartesian, &marks.cart).is_empty()
        }
    };
    if !ready {
        return Err(Error::MissingLifts(match flavor {
            Flavor::Gray => "not a Gray fibration".into(),
            Flavor::Ortho => "not a local orthofibration".into(),
        }));
    }
    Ok(interpolating_edges_with(p, flavor, &marks))
}

/// Agreement of "lifts over B" with the criterion through `p_2`, for both
/// cocartesian and cartesian lifts.
pub fn check_factor_criterion(p: &FibredFunctor) -> bool {
    let full = p.full();
    let bdir = p.b_direction();
    let p2 = p.p2();
    let l2 = Lens::full(&p2);
    let all_b = vec![true; p.base_b().num_morphisms()];
    [Direction::Cocartesian, Direction::Cartesian].into_iter().all(|dir| {
        let direct = full.missing_lifts(&bdir, dir, &full.marks(dir)).is_empty();
        let marks2 = l2.marks(dir);
        let via_p2 = l2.missing_lifts(&all_b, dir, &marks2).is_empty()
            && p.total().morphism_ids().filter(|&f| marks2[f]).all(|f| p.a_iso(f));
        direct == via_p2
    })
}

/// The structural laws tying the flags of a report to `p`, each recomputed
/// independently of the report.
pub fn taxonomy_laws(p: &FibredFunctor) -> Verdict {
    taxonomy_laws_with(p, &classify(p))
}

pub fn taxonomy_laws_with(p: &FibredFunctor, r: &FibrationReport) -> Verdict {
    if !r.implications_hold() {
        return Verdict::fail("flag implications fail");
    }
    if !check_factor_criterion(p) {
        return Verdict::fail("lifts over B disagree with the criterion through the second projection");
    }
    let marks = Marks::compute(p);
    let (adir, bdir) = (p.a_direction(), p.b_direction());
    let (left, right) = (p.left(), p.right());
    let x = p.total();
    let left_cocart_fib = left.missing_lifts(&adir, Direction::Cocartesian, &marks.left_cocart).is_empty();
    let right_cart_fib = right.missing_lifts(&bdir, Direction::Cartesian, &marks.right_cart).is_empty();
    let left_fib_l = left_cocart_fib && x.morphism_ids().filter(|&f| left.visible(f)).all(|f| marks.left_cocart[f]);
    let right_fib_r = right_cart_fib && x.morphism_ids().filter(|&f| right.visible(f)).all(|f| marks.right_cart[f]);
    let cocart_a = Lens::full(&p.proj).missing_lifts(&adir, Direction::Cocartesian, &marks.cocart).is_empty();
    let cart_b = Lens::full(&p.proj).missing_lifts(&bdir, Direction::Cartesian, &marks.cart).is_empty();
    let local_ortho = cocart_a && cart_b;
    if local_ortho != r.local_ortho {
        return Verdict::fail("local orthofibration flag disagrees with the lifts");
    }
    if ((cocart_a && right_cart_fib) || (cart_b && left_cocart_fib)) && !r.local_ortho {
        return Verdict::fail("one-sided lifts with a (co)cartesian restriction but not a local orthofibration");
    }
    let groupoid_fibers = p.base.cat.objects().all(|s| homotopy_fiber(&p.proj, s).is_groupoid());
    let conservative = x
        .morphism_ids()
        .all(|f| !p.base.cat.is_iso(p.proj.mor(f)) || x.is_iso(f));
    if conservative != r.conservative {
        return Verdict::fail("conservativity flag disagrees with the edges");
    }
    if r.local_ortho {
        let agree = [conservative, groupoid_fibers, left_fib_l, right_fib_r];
        if agree.iter().any(|&v| v != agree[0]) || agree[0] != r.bifib {
            return Verdict::fail(format!(
                "bifibration conditions disagree: conservative {}, groupoid fibers {}, left restriction a left fibration {}, right restriction a right fibration {}",
                agree[0], agree[1], agree[2], agree[3]
            ));
        }
        if r.bifib && !r.ortho {
            return Verdict::fail("bifibration that is not an orthofibration");
        }
    }
    if r.gray {
        let edges = match interpolating_edges(p, Flavor::Gray) {
            Ok(e) => e,
            Err(e) => return Verdict::fail(format!("Gray flag without interpolating diagrams: {e}")),
        };
        let all_iso = edges.iter().all(|&e| x.is_iso(e));
        if all_iso != r.cocartesian_fibration {
            return Verdict::fail(format!(
                "Gray fibration with all interpolating edges invertible {} but cocartesian {}",
                all_iso, r.cocartesian_fibration
            ));
        }
        if r.left_fib != conservative || conservative != groupoid_fibers {
            return Verdict::fail("Gray fibration: left fibration, conservative and groupoid fibers disagree");
        }
    }
    Verdict::pass()
}

/// The homotopy fiber of `p` over `s`: objects `(x, α: p x ≅ s)`, arrows
/// `g: x -> x'` with `α' ∘ p g = α`.
pub fn homotopy_fiber(p: &FinFunctor, s: Obj) -> FinCat {
    let (x, b) = (p.source(), p.target());
    let mut objs = Vec::new();
    for o in x.objects() {
        for &a in b.hom(p.obj(o), s) {
            if b.is_iso(a) {
                objs.push((o, a));
            }
        }
    }
    let mut morphisms = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (i, &(o, a)) in objs.iter().enumerate() {
        for (j, &(o2, a2)) in objs.iter().enumerate() {
            for &g in x.hom(o, o2) {
                if b.compose(a2, p.mor(g)) == a {
                    index.insert((i, j, g), morphisms.len());
                    morphisms.push(crate::fincat::Morphism {
                        name: format!("{}@{}", x.morphism_name(g), morphisms.len()),
                        src: i,
                        dst: j,
                    });
                }
            }
        }
    }
    let names = objs
        .iter()
        .map(|&(o, a)| format!("({},{})", x.object_name(o), b.morphism_name(a)))
        .collect();
    let gs: Vec<Mor> = {
        let mut v = vec![0; morphisms.len()];
        for (&(_, _, g), &k) in &index {
            v[k] = g;
        }
        v
    };
    let identity = objs.iter().enumerate().map(|(i, &(o, _))| index[&(i, i, x.id(o))]).collect();
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src, m.dst)).collect();
    FinCat::from_table(names, morphisms, identity, |v, u| {
        index.get(&(ends[u].0, ends[v].1, x.compose(gs[v], gs[u]))).copied()
    })
    .expect("homotopy fiber")
}

/// Whether every isomorphism of the base out of `p x` lifts to an
/// isomorphism out of `x` lying exactly over it.
pub fn is_isofibration(p: &FinFunctor) -> bool {
    let (x, s) = (p.source(), p.target());
    x.objects().all(|o| {
        s.out_of(p.obj(o))
            .iter()
            .filter(|&&b| s.is_iso(b))
            .all(|&b| x.out_of(o).iter().any(|&g| p.mor(g) == b && x.is_iso(g)))
    })
}

/// An isofibration equivalent to `p` over its base: objects are pairs
/// `(x, α: p x ≅ s)` over `s`, and arrows `(x, α) -> (x', α')` are the arrows
/// `g: x -> x'`, lying over `α' ∘ p g ∘ α⁻¹`. Pairs with `α` an identity
/// keep the names of `x` and of the arrows between them.
pub fn isofibrant_replacement(p: &FinFunctor) -> FinFunctor {
    let (x, s) = (p.source(), p.target());
    let mut objs = Vec::new();
    for o in x.objects() {
        for &a in s.out_of(p.obj(o)) {
            if s.is_iso(a) {
                objs.push((o, a));
            }
        }
    }
    let name = |&(o, a): &(Obj, Mor)| {
        if s.is_identity(a) {
            x.object_name(o).to_string()
        } else {
            format!("{}@{}", x.object_name(o), s.morphism_name(a))
        }
    };
    let names: Vec<String> = objs.iter().map(name).collect();
    let mut morphisms = Vec::new();
    let mut arrows = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (i, &(o, a)) in objs.iter().enumerate() {
        for (j, &(o2, a2)) in objs.iter().enumerate() {
            for &g in x.hom(o, o2) {
                let mor_name = if s.is_identity(a) && s.is_identity(a2) {
                    x.morphism_name(g).to_string()
                } else {
                    format!("{}:{}->{}", x.morphism_name(g), names[i], names[j])
                };
                index.insert((i, j, g), morphisms.len());
                morphisms.push(crate::fincat::Morphism { name: mor_name, src: i, dst: j });
                arrows.push(g);
            }
        }
    }
    let identity = objs.iter().enumerate().map(|(i, &(o, _))| index[&(i, i, x.id(o))]).collect();
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src, m.dst)).collect();
    let total = FinCat::from_table(names, morphisms, identity, |v, u| {
        index.get(&(ends[u].0, ends[v].1, x.compose(arrows[v], arrows[u]))).copied()
    })
    .expect("isofibrant replacement");
    let obj = objs.iter().map(|&(_, a)| s.dst(a)).collect();
    let mor = arrows
        .iter()
        .zip(&ends)
        .map(|(&g, &(i, j))| {
            let back = s.inverse(objs[i].1).expect("isomorphism");
            s.compose(objs[j].1, s.compose(p.mor(g), back))
        })
        .collect();
    FinFunctor::new(Arc::new(total), s.clone(), obj, mor).expect("isofibrant replacement")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{arrow_category, simplex};

    fn chain(n: usize) -> Arc<FinCat> {
        Arc::new(simplex(n))
    }

    #[test]
    fn isofibrant_replacement_of_a_point_in_an_iso() {
        let iso = Arc::new(FinCat::walking_iso());
        let pt = Arc::new(simplex(0));
        let p = FinFunctor::new(pt.clone(), iso.clone(), vec![0], vec![0]).unwrap();
        assert!(!is_isofibration(&p));
        let q = isofibrant_replacement(&p);
        assert!(is_isofibration(&q));
        assert_eq!((q.source().num_objects(), q.source().num_morphisms()), (2, 4));
        assert!(crate::fincat::equivalent_categories(p.source(), q.source()).unwrap().is_some());
        // nothing changes over a poset
        let arrows = arrow_category(&chain(1));
        assert!(is_isofibration(&arrows.proj));
        assert!(**isofibrant_replacement(&arrows.proj).source() == *arrows.cat);
    }

    #[test]
    fn identities_are_cartesian_and_cocartesian() {
        let p = FibredFunctor::identity(&chain(1), &chain(1));
        for f in p.total().morphism_ids() {
            let t = edge_type(&p.proj, f);
            assert!(t.cartesian && t.cocartesian && t.locally_cartesian && t.locally_cocartesian);
        }
    }

    #[test]
    fn second_projection_cocartesian_edges() {
        let (a, b) = (chain(1), chain(1));
        let prod = product(&a, &b);
        let pr2 = prod.second.clone();
        for f in prod.cat.morphism_ids() {
            let in_b = a.is_iso(prod.first.mor(f));
            assert_eq!(edge_type(&pr2, f).cocartesian, in_b);
        }
    }

    #[test]
    fn identity_fibration_report() {
        let r = classify(&FibredFunctor::identity(&chain(1), &chain(2)));
        assert!(r.flags().iter().all(|(_, v)| *v));
        assert!(r.implications_hold());
    }

    #[test]
    fn arrow_category_is_a_bifibration() {
        let ar = arrow_category(&chain(1));
        let p = FibredFunctor::new(ar.proj.clone(), ar.base.clone()).unwrap();
        let r = classify(&p);
        assert!(r.bifib && r.ortho && r.local_ortho, "{r:?}");
        assert!(r.implications_hold());
    }

    #[test]
    fn point_over_an_arrow_lacks_lifts() {
        let (x, s) = (chain(0), chain(1));
        let p = FinFunctor::new(x, s.clone(), vec![0], vec![0]).unwrap();
        let e = WideSubcat::generated(s.clone(), [s.arrow(0, 1).unwrap()]);
        // nothing lies over 1, so cartesian lifts exist vacuously
        assert!(has_sufficient_lifts(&p, &e, Direction::Cartesian).ok);
        let check = has_sufficient_lifts(&p, &e, Direction::Cocartesian);
        assert!(!check.ok);
        assert_eq!(check.missing, vec![(s.arrow(0, 1).unwrap(), 0)]);
    }

    #[test]
    fn factor_criterion_on_simple_inputs() {
        let (a, b) = (chain(1), chain(1));
        let prod = product(&a, &b);
        let p = FibredFunctor::new(FinFunctor::identity(&prod.cat), prod).unwrap();
        assert!(check_factor_criterion(&p));
    }

    #[test]
    fn homotopy_fibers_of_identity_are_points() {
        let c = Arc::new(FinCat::walking_iso());
        let id = FinFunctor::identity(&c);
        let f = homotopy_fiber(&id, 0);
        assert_eq!(f.num_objects(), 2);
        assert!(crate::fincat::equivalent_categories(&Arc::new(f), &chain(0)).unwrap().is_some());
    }
}
