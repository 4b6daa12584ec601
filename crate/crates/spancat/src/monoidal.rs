//! Strict monoidal categories, their encoding as Segal diagrams over a
//! truncation of `Γ^op`, and doctrinal adjunction: the oplax structure on
//! the left adjoint of a lax monoidal functor.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{is_equivalence, product, product_functor, FinCat, FinFunctor, Mor, Morphism, NatTrans, Obj, Product, WideSubcat};
use crate::grothendieck::CatDiagram;
use crate::mates::{find_left_adjoint, mate_via_dualization, validate_adjunction, Adjunction, LaxTransformation};
use crate::shapes::simplex;
use crate::triplespan::posets_up_to_iso;
use crate::Verdict;

/// A pointed map `<from> -> <to>`, recorded by where each non-base point
/// goes (`None` for the base point).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialMap {
    pub from: usize,
    pub to: usize,
    pub image: Vec<Option<usize>>,
}

impl PartialMap {
    pub fn preimage(&self, j: usize) -> Vec<usize> {
        (0..self.from).filter(|&i| self.image[i] == Some(j)).collect()
    }

    /// Every point of the target has exactly one preimage.
    pub fn is_inert(&self) -> bool {
        (0..self.to).all(|j| self.preimage(j).len() == 1)
    }

    /// Only the base point goes to the base point.
    pub fn is_active(&self) -> bool {
        self.image.iter().all(|i| i.is_some())
    }

    fn label(&self) -> String {
        let image: String = self.image.iter().map(|i| i.map_or('_', |j| char::from_digit(j as u32 + 1, 36).unwrap_or('?'))).collect();
        format!("{}>{}:{}", self.from, self.to, image)
    }
}

/// The full subcategory of finite pointed sets on `<0>, ..., <N>`.
#[derive(Clone, Debug)]
pub struct GammaOpTrunc {
    pub bound: usize,
    pub cat: Arc<FinCat>,
    pub maps: Vec<PartialMap>,
    pub inert: WideSubcat,
    pub active: WideSubcat,
}

impl GammaOpTrunc {
    pub fn map_index(&self, map: &PartialMap) -> Option<Mor> {
        self.cat.hom(map.from, map.to).iter().copied().find(|&m| self.maps[m] == *map)
    }

    /// The inert map `<n> -> <1>` keeping only `i`.
    pub fn projection(&self, n: usize, i: usize) -> Mor {
        let image = (0..n).map(|k| (k == i).then_some(0)).collect();
        self.map_index(&PartialMap { from: n, to: 1, image }).expect("projection within the bound")
    }
}

fn all_partial_maps(n: usize, m: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Option<usize>>| {
                std::iter::once(None).chain((0..m).map(Some)).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn gamma_op_truncated(bound: usize) -> GammaOpTrunc {
    let mut maps = Vec::new();
    let mut identity = vec![0; bound + 1];
    for (n, id) in identity.iter_mut().enumerate() {
        for m in 0..=bound {
            for image in all_partial_maps(n, m) {
                let map = PartialMap { from: n, to: m, image };
                if n == m && map.image.iter().enumerate().all(|(i, &j)| j == Some(i)) {
                    *id = maps.len();
                }
                maps.push(map);
            }
        }
    }
    let index: HashMap<PartialMap, Mor> = maps.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
    let morphisms = maps
        .iter()
        .map(|m| Morphism { name: m.label(), src: m.from, dst: m.to })
        .collect();
    let objects = (0..=bound).map(|n| format!("<{n}>")).collect();
    let cat = FinCat::from_table(objects, morphisms, identity, |g, f| {
        let (f, g) = (&maps[f], &maps[g]);
        let image = f.image.iter().map(|&i| i.and_then(|i| g.image[i])).collect();
        index.get(&PartialMap { from: f.from, to: g.to, image }).copied()
    })
    .expect("partial maps form a category");
    let cat = Arc::new(cat);
    let inert = WideSubcat::new(cat.clone(), (0..maps.len()).filter(|&k| maps[k].is_inert())).expect("inerts compose");
    let active = WideSubcat::new(cat.clone(), (0..maps.len()).filter(|&k| maps[k].is_active())).expect("actives compose");
    GammaOpTrunc { bound, cat, maps, inert, active }
}

/// `C^n` with tuples encoded in base `|C|` (objects) and `|Mor C|` (arrows),
/// first coordinate most significant.
#[derive(Clone, Debug)]
pub struct Power {
    pub base: Arc<FinCat>,
    pub n: usize,
    pub cat: Arc<FinCat>,
}

impl Power {
    pub fn new(base: &Arc<FinCat>, n: usize) -> Power {
        let cat = match n {
            0 => Arc::new(simplex(0)),
            1 => base.clone(),
            _ => product(&Power::new(base, n - 1).cat, base).cat,
        };
        Power { base: base.clone(), n, cat }
    }

    pub fn obj(&self, xs: &[Obj]) -> Obj {
        xs.iter().fold(0, |acc, &x| acc * self.base.num_objects() + x)
    }

    pub fn mor(&self, fs: &[Mor]) -> Mor {
        fs.iter().fold(0, |acc, &f| acc * self.base.num_morphisms() + f)
    }

    pub fn obj_parts(&self, mut x: Obj) -> Vec<Obj> {
        let k = self.base.num_objects();
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = x % k;
            x /= k;
        }
        out
    }

    pub fn mor_parts(&self, mut f: Mor) -> Vec<Mor> {
        let k = self.base.num_morphisms();
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = f % k;
            f /= k;
        }
        out
    }

    /// `F^n` between two powers of the same exponent.
    pub fn map(&self, target: &Power, f: &FinFunctor) -> FinFunctor {
        let obj = self.cat.objects().map(|x| target.obj(&self.obj_parts(x).iter().map(|&o| f.obj(o)).collect::<Vec<_>>())).collect();
        let mor = self.cat.morphism_ids().map(|m| target.mor(&self.mor_parts(m).iter().map(|&g| f.mor(g)).collect::<Vec<_>>())).collect();
        FinFunctor::new(self.cat.clone(), target.cat.clone(), obj, mor).expect("power of a functor")
    }
}

/// A strict monoidal structure on a finite category.
#[derive(Clone, Debug)]
pub struct StrictMonCat {
    pub carrier: Arc<FinCat>,
    pub square: Product,
    pub tensor: FinFunctor,
    pub unit: Obj,
}

impl StrictMonCat {
    pub fn new(carrier: Arc<FinCat>, tensor_obj: Vec<Obj>, tensor_mor: Vec<Mor>, unit: Obj) -> Result<Self> {
        let square = product(&carrier, &carrier);
        let tensor = FinFunctor::new(square.cat.clone(), carrier.clone(), tensor_obj, tensor_mor)?;
        let m = StrictMonCat { carrier, square, tensor, unit };
        let c = &m.carrier;
        if unit >= c.num_objects() {
            return Err(Error::ShapeMismatch("unit is not an object".into()));
        }
        let u = c.id(unit);
        for f in c.morphism_ids() {
            if m.tensor_mor(u, f) != f || m.tensor_mor(f, u) != f {
                return Err(Error::IncoherentLaxStructure(format!("unit law fails at {}", c.morphism_name(f))));
            }
            for g in c.morphism_ids() {
                for h in c.morphism_ids() {
                    if m.tensor_mor(m.tensor_mor(f, g), h) != m.tensor_mor(f, m.tensor_mor(g, h)) {
                        return Err(Error::IncoherentLaxStructure(format!(
                            "tensor is not associative at ({}, {}, {})",
                            c.morphism_name(f),
                            c.morphism_name(g),
                            c.morphism_name(h)
                        )));
                    }
                }
            }
        }
        Ok(m)
    }

    /// A monoidal poset from its tensor on objects.
    pub fn thin(carrier: Arc<FinCat>, table: &[Vec<Obj>], unit: Obj) -> Result<Self> {
        let square = product(&carrier, &carrier);
        let obj: Vec<Obj> = square.cat.objects().map(|o| table[square.first.obj(o)][square.second.obj(o)]).collect();
        let tensor = FinFunctor::into_thin(square.cat.clone(), carrier.clone(), obj)?;
        StrictMonCat::new(carrier, tensor.object_map().to_vec(), tensor.morphism_map().to_vec(), unit)
    }

    pub fn tensor_obj(&self, x: Obj, y: Obj) -> Obj {
        self.tensor.obj(self.square.pair_obj(x, y))
    }

    pub fn tensor_mor(&self, f: Mor, g: Mor) -> Mor {
        self.tensor.mor(self.square.pair_mor(f, g))
    }

    pub fn tensor_all(&self, xs: &[Obj]) -> Obj {
        xs.iter().fold(self.unit, |acc, &x| self.tensor_obj(acc, x))
    }

    pub fn tensor_all_mor(&self, fs: &[Mor]) -> Mor {
        fs.iter().fold(self.carrier.id(self.unit), |acc, &f| self.tensor_mor(acc, f))
    }

    /// `x ⊗ y = y ⊗ x` on the nose, for objects and arrows.
    pub fn is_commutative(&self) -> bool {
        let c = &self.carrier;
        c.morphism_ids().all(|f| c.morphism_ids().all(|g| self.tensor_mor(f, g) == self.tensor_mor(g, f)))
    }
}

/// `G: C -> D` with `μ: G x ⊗ G y -> G(x ⊗ y)` and `μ0: 1 -> G 1`.
#[derive(Clone, Debug)]
pub struct LaxMonFunctor {
    pub source: StrictMonCat,
    pub target: StrictMonCat,
    pub underlying: FinFunctor,
    pub mu: NatTrans,
    pub mu0: Mor,
}

/// `F: D -> C` with `δ: F(x ⊗ y) -> F x ⊗ F y` and `δ0: F 1 -> 1`.
#[derive(Clone, Debug)]
pub struct OplaxMonFunctor {
    pub source: StrictMonCat,
    pub target: StrictMonCat,
    pub underlying: FinFunctor,
    pub delta: NatTrans,
    pub delta0: Mor,
}

fn check_ends(source: &StrictMonCat, target: &StrictMonCat, f: &FinFunctor) -> Result<()> {
    if **f.source() != *source.carrier || **f.target() != *target.carrier {
        return Err(Error::ShapeMismatch("functor does not run between the carriers".into()));
    }
    Ok(())
}

impl LaxMonFunctor {
    /// `mu` is indexed by the objects of `C × C`.
    pub fn new(source: StrictMonCat, target: StrictMonCat, underlying: FinFunctor, mu: Vec<Mor>, mu0: Mor) -> Result<Self> {
        check_ends(&source, &target, &underlying)?;
        let both = product_functor(&underlying, &underlying, &source.square, &target.square);
        let mu = NatTrans::new(target.tensor.after(&both), underlying.after(&source.tensor), mu)?;
        let d = &target.carrier;
        if d.src(mu0) != target.unit || d.dst(mu0) != underlying.obj(source.unit) {
            return Err(Error::ShapeMismatch("unit cell has the wrong endpoints".into()));
        }
        let g = LaxMonFunctor { source, target, underlying, mu, mu0 };
        g.check_coherence()?;
        Ok(g)
    }

    pub fn mu_at(&self, x: Obj, y: Obj) -> Mor {
        self.mu.component(self.source.square.pair_obj(x, y))
    }

    fn check_coherence(&self) -> Result<()> {
        let (c, d) = (&self.source, &self.target);
        let g = &self.underlying;
        let dc = &d.carrier;
        let bad = |s: String| Err(Error::IncoherentLaxStructure(s));
        for x in c.carrier.objects() {
            let gx = dc.id(g.obj(x));
            let left = dc.compose(self.mu_at(c.unit, x), d.tensor_mor(self.mu0, gx));
            let right = dc.compose(self.mu_at(x, c.unit), d.tensor_mor(gx, self.mu0));
            if left != gx || right != gx {
                return bad(format!("unit coherence fails at {}", c.carrier.object_name(x)));
            }
            for y in c.carrier.objects() {
                for z in c.carrier.objects() {
                    let gz = dc.id(g.obj(z));
                    let lhs = dc.compose(self.mu_at(c.tensor_obj(x, y), z), d.tensor_mor(self.mu_at(x, y), gz));
                    let rhs = dc.compose(self.mu_at(x, c.tensor_obj(y, z)), d.tensor_mor(gx, self.mu_at(y, z)));
                    if lhs != rhs {
                        return bad(format!(
                            "associativity coherence fails at ({}, {}, {})",
                            c.carrier.object_name(x),
                            c.carrier.object_name(y),
                            c.carrier.object_name(z)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_strong(&self) -> bool {
        self.mu.is_iso() && self.target.carrier.is_iso(self.mu0)
    }

    /// `μ` iterated over a list: `G x1 ⊗ ... ⊗ G xk -> G(x1 ⊗ ... ⊗ xk)`.
    pub fn mu_iterated(&self, xs: &[Obj]) -> Mor {
        let d = &self.target.carrier;
        match xs.len() {
            0 => self.mu0,
            1 => d.id(self.underlying.obj(xs[0])),
            k => {
                let head = &xs[..k - 1];
                let last = xs[k - 1];
                d.compose(
                    self.mu_at(self.source.tensor_all(head), last),
                    self.target.tensor_mor(self.mu_iterated(head), d.id(self.underlying.obj(last))),
                )
            }
        }
    }
}

impl OplaxMonFunctor {
    pub fn new(source: StrictMonCat, target: StrictMonCat, underlying: FinFunctor, delta: Vec<Mor>, delta0: Mor) -> Result<Self> {
        check_ends(&source, &target, &underlying)?;
        let both = product_functor(&underlying, &underlying, &source.square, &target.square);
        let delta = NatTrans::new(underlying.after(&source.tensor), target.tensor.after(&both), delta)?;
        let c = &target.carrier;
        if c.src(delta0) != underlying.obj(source.unit) || c.dst(delta0) != target.unit {
            return Err(Error::ShapeMismatch("counit cell has the wrong endpoints".into()));
        }
        let f = OplaxMonFunctor { source, target, underlying, delta, delta0 };
        f.check_coherence()?;
        Ok(f)
    }

    pub fn delta_at(&self, x: Obj, y: Obj) -> Mor {
        self.delta.component(self.source.square.pair_obj(x, y))
    }

    fn check_coherence(&self) -> Result<()> {
        let (d, c) = (&self.source, &self.target);
        let f = &self.underlying;
        let cc = &c.carrier;
        let bad = |s: String| Err(Error::IncoherentLaxStructure(s));
        for x in d.carrier.objects() {
            let fx = cc.id(f.obj(x));
            let left = cc.compose(c.tensor_mor(self.delta0, fx), self.delta_at(d.unit, x));
            let right = cc.compose(c.tensor_mor(fx, self.delta0), self.delta_at(x, d.unit));
            if left != fx || right != fx {
                return bad(format!("counit coherence fails at {}", d.carrier.object_name(x)));
            }
            for y in d.carrier.objects() {
                for z in d.carrier.objects() {
                    let fz = cc.id(f.obj(z));
                    let lhs = cc.compose(c.tensor_mor(self.delta_at(x, y), fz), self.delta_at(d.tensor_obj(x, y), z));
                    let rhs = cc.compose(c.tensor_mor(fx, self.delta_at(y, z)), self.delta_at(x, d.tensor_obj(y, z)));
                    if lhs != rhs {
                        return bad(format!(
                            "coassociativity fails at ({}, {}, {})",
                            d.carrier.object_name(x),
                            d.carrier.object_name(y),
                            d.carrier.object_name(z)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_strong(&self) -> bool {
        self.delta.is_iso() && self.target.carrier.is_iso(self.delta0)
    }

    /// `F(y1 ⊗ ... ⊗ yk) -> F y1 ⊗ ... ⊗ F yk`.
    pub fn delta_iterated(&self, ys: &[Obj]) -> Mor {
        let c = &self.target.carrier;
        match ys.len() {
            0 => self.delta0,
            1 => c.id(self.underlying.obj(ys[0])),
            k => {
                let head = &ys[..k - 1];
                let last = ys[k - 1];
                c.compose(
                    self.target.tensor_mor(self.delta_iterated(head), c.id(self.underlying.obj(last))),
                    self.delta_at(self.source.tensor_all(head), last),
                )
            }
        }
    }
}

fn check_adjunction_for(g: &LaxMonFunctor, adj: &Adjunction) -> Result<()> {
    if adj.right != g.underlying {
        return Err(Error::MissingLeftAdjoint("adjunction is not for the underlying functor".into()));
    }
    let v = validate_adjunction(adj);
    if !v.passed {
        return Err(Error::MissingLeftAdjoint(v.witness.unwrap_or_default()));
    }
    Ok(())
}

/// The oplax structure on the left adjoint:
/// `δ = ε_{Fx ⊗ Fy} ∘ F(μ_{Fx,Fy}) ∘ F(η_x ⊗ η_y)` and `δ0 = ε_1 ∘ F(μ0)`.
pub fn doctrinal_mate(g: &LaxMonFunctor, adj: &Adjunction) -> Result<OplaxMonFunctor> {
    check_adjunction_for(g, adj)?;
    let (c, d) = (&g.source, &g.target);
    let f = &adj.left;
    let cc = &c.carrier;
    let delta = d
        .square
        .cat
        .objects()
        .map(|o| {
            let (x, y) = (d.square.first.obj(o), d.square.second.obj(o));
            let (fx, fy) = (f.obj(x), f.obj(y));
            let inner = d.carrier.compose(g.mu_at(fx, fy), d.tensor_mor(adj.eta(x), adj.eta(y)));
            cc.compose(adj.epsilon(c.tensor_obj(fx, fy)), f.mor(inner))
        })
        .collect();
    let delta0 = cc.compose(adj.epsilon(c.unit), f.mor(g.mu0));
    OplaxMonFunctor::new(d.clone(), c.clone(), f.clone(), delta, delta0)
}

/// The converse: `μ = G(ε_x ⊗ ε_y) ∘ G(δ_{Gx,Gy}) ∘ η_{Gx ⊗ Gy}` and
/// `μ0 = G(δ0) ∘ η_1`.
pub fn lax_of_oplax(f: &OplaxMonFunctor, adj: &Adjunction) -> Result<LaxMonFunctor> {
    if adj.left != f.underlying {
        return Err(Error::ShapeMismatch("adjunction is not for the underlying functor".into()));
    }
    let (d, c) = (&f.source, &f.target);
    let g = &adj.right;
    let dc = &d.carrier;
    let mu = c
        .square
        .cat
        .objects()
        .map(|o| {
            let (x, y) = (c.square.first.obj(o), c.square.second.obj(o));
            let (gx, gy) = (g.obj(x), g.obj(y));
            let outer = c.carrier.compose(c.tensor_mor(adj.epsilon(x), adj.epsilon(y)), f.delta_at(gx, gy));
            dc.compose(g.mor(outer), adj.eta(d.tensor_obj(gx, gy)))
        })
        .collect();
    let mu0 = dc.compose(g.mor(f.delta0), adj.eta(d.unit));
    LaxMonFunctor::new(c.clone(), d.clone(), g.clone(), mu, mu0)
}

/// The lax structure survives the passage to the left adjoint and back.
pub fn doctrinal_round_trip(g: &LaxMonFunctor, adj: &Adjunction) -> Result<Verdict> {
    let back = lax_of_oplax(&doctrinal_mate(g, adj)?, adj)?;
    Ok(lax_mon_agree(&back, g))
}

pub fn lax_mon_agree(a: &LaxMonFunctor, b: &LaxMonFunctor) -> Verdict {
    if a.mu0 != b.mu0 {
        return Verdict::fail("unit cells differ");
    }
    for o in a.source.square.cat.objects() {
        if a.mu.component(o) != b.mu.component(o) {
            return Verdict::fail(format!("cells differ at {}", a.source.square.cat.object_name(o)));
        }
    }
    Verdict::pass()
}

/// `<n> ↦ M^n`, a pointed map acting by tensoring each preimage in order.
pub fn mon_cat_to_gamma_diagram(m: &StrictMonCat, gamma: &GammaOpTrunc) -> Result<CatDiagram> {
    if !m.is_commutative() {
        return Err(Error::ShapeMismatch("tensor is not strictly commutative".into()));
    }
    let powers: Vec<Power> = (0..=gamma.bound).map(|n| Power::new(&m.carrier, n)).collect();
    let functors = gamma.maps.iter().map(|f| act(m, f, &powers[f.from], &powers[f.to])).collect();
    CatDiagram::strict(gamma.cat.clone(), powers.iter().map(|p| p.cat.clone()).collect(), functors)
}

fn act(m: &StrictMonCat, f: &PartialMap, from: &Power, to: &Power) -> FinFunctor {
    let pre: Vec<Vec<usize>> = (0..f.to).map(|j| f.preimage(j)).collect();
    let obj = from
        .cat
        .objects()
        .map(|x| {
            let xs = from.obj_parts(x);
            to.obj(&pre.iter().map(|p| m.tensor_all(&p.iter().map(|&i| xs[i]).collect::<Vec<_>>())).collect::<Vec<_>>())
        })
        .collect();
    let mor = from
        .cat
        .morphism_ids()
        .map(|u| {
            let us = from.mor_parts(u);
            to.mor(&pre.iter().map(|p| m.tensor_all_mor(&p.iter().map(|&i| us[i]).collect::<Vec<_>>())).collect::<Vec<_>>())
        })
        .collect();
    FinFunctor::new(from.cat.clone(), to.cat.clone(), obj, mor).expect("action of a pointed map")
}

/// For each `<n>`, the inert projections exhibit `D<n>` as `D<1>^n`.
pub fn segal_condition_check(gamma: &GammaOpTrunc, d: &CatDiagram) -> Verdict {
    if *d.index != *gamma.cat {
        return Verdict::fail("diagram is not indexed by the truncated Γ^op");
    }
    let one = d.value(1.min(gamma.bound)).clone();
    for n in 0..=gamma.bound {
        if gamma.bound == 0 {
            break;
        }
        let power = Power::new(&one, n);
        let projections: Vec<&FinFunctor> = (0..n).map(|i| d.functor(gamma.projection(n, i))).collect();
        let src = d.value(n);
        let obj = src.objects().map(|x| power.obj(&projections.iter().map(|p| p.obj(x)).collect::<Vec<_>>())).collect();
        let mor = src.morphism_ids().map(|u| power.mor(&projections.iter().map(|p| p.mor(u)).collect::<Vec<_>>())).collect();
        let ok = FinFunctor::new(src.clone(), power.cat.clone(), obj, mor).map(|f| is_equivalence(&f)).unwrap_or(false);
        if !ok {
            return Verdict::fail(format!("<{n}>"));
        }
    }
    Verdict::pass()
}

/// The lax transformation `M^⊗ => N^⊗` over the truncated `Γ^op` induced by
/// a lax monoidal functor, with cells the iterated `μ`.
pub fn lax_monoidal_to_gamma(g: &LaxMonFunctor, gamma: &GammaOpTrunc) -> Result<LaxTransformation> {
    let x = mon_cat_to_gamma_diagram(&g.source, gamma)?;
    let y = mon_cat_to_gamma_diagram(&g.target, gamma)?;
    let xp: Vec<Power> = (0..=gamma.bound).map(|n| Power::new(&g.source.carrier, n)).collect();
    let yp: Vec<Power> = (0..=gamma.bound).map(|n| Power::new(&g.target.carrier, n)).collect();
    let components: Vec<FinFunctor> = (0..=gamma.bound).map(|n| xp[n].map(&yp[n], &g.underlying)).collect();
    let cells = gamma
        .maps
        .iter()
        .map(|f| {
            let pre: Vec<Vec<usize>> = (0..f.to).map(|j| f.preimage(j)).collect();
            xp[f.from]
                .cat
                .objects()
                .map(|o| {
                    let xs = xp[f.from].obj_parts(o);
                    yp[f.to].mor(&pre.iter().map(|p| g.mu_iterated(&p.iter().map(|&i| xs[i]).collect::<Vec<_>>())).collect::<Vec<_>>())
                })
                .collect()
        })
        .collect();
    LaxTransformation::from_components(x, y, components, cells)
}

/// The fibrewise adjoints of a lax map of Segal diagrams.
#[derive(Clone, Debug)]
pub struct FibrewiseAdjoints {
    pub verdict: Verdict,
    pub adjunctions: Vec<Adjunction>,
}

/// A left adjoint at `<1>` exists exactly when one exists at every `<n>`;
/// when the components are powers of the one at `<1>`, the powers of its
/// adjunction are checked to be adjunctions as well.
pub fn fibrewise_adjoint_check(gamma: &GammaOpTrunc, rho: &LaxTransformation) -> Result<FibrewiseAdjoints> {
    for d in [&rho.source, &rho.target] {
        let v = segal_condition_check(gamma, d);
        if !v.passed {
            return Err(Error::NotSegal(v.witness.unwrap_or_default()));
        }
    }
    let found: Vec<Result<Adjunction>> = rho.components.iter().map(find_left_adjoint).collect();
    let at_one = gamma.bound.min(1);
    let adjunctions: Vec<Adjunction> = found.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let first_missing = found.iter().position(|r| r.is_err());
    let verdict = match (&found[at_one], first_missing) {
        (_, None) => Verdict::pass(),
        (Err(e), _) => Verdict::fail(format!("no left adjoint at <{at_one}>: {e}")),
        (Ok(_), Some(n)) => Verdict::fail(format!("left adjoint at <{at_one}> but not at <{n}>")),
    };
    if let Ok(adj) = &found[at_one] {
        let one = &rho.components[at_one];
        let (xs, ys) = (one.source(), one.target());
        for n in 0..=gamma.bound {
            let (xp, yp) = (Power::new(xs, n), Power::new(ys, n));
            if xp.map(&yp, one) == rho.components[n] {
                let powered = power_adjunction(adj, n)?;
                let v = validate_adjunction(&powered);
                if !v.passed {
                    return Ok(FibrewiseAdjoints { verdict: Verdict::fail(format!("<{n}>: {}", v.witness.unwrap_or_default())), adjunctions });
                }
            }
        }
    }
    Ok(FibrewiseAdjoints { verdict, adjunctions })
}

/// The componentwise adjunction `F^n ⊣ G^n`.
pub fn power_adjunction(adj: &Adjunction, n: usize) -> Result<Adjunction> {
    let (c, d) = (adj.left.source(), adj.left.target());
    let (cp, dp) = (Power::new(c, n), Power::new(d, n));
    let left = cp.map(&dp, &adj.left);
    let right = dp.map(&cp, &adj.right);
    let unit = cp.cat.objects().map(|x| cp.mor(&cp.obj_parts(x).iter().map(|&o| adj.eta(o)).collect::<Vec<_>>())).collect();
    let counit = dp.cat.objects().map(|y| dp.mor(&dp.obj_parts(y).iter().map(|&o| adj.epsilon(o)).collect::<Vec<_>>())).collect();
    Adjunction::new(left, right, unit, counit)
}

/// Encodes `G` over `Γ^op_{≤N}`, computes the mate of every cell by the
/// collage route one arrow at a time, and compares it with the iterated
/// `δ`. Mates over inert maps must also be invertible.
pub fn gamma_agreement_check(g: &LaxMonFunctor, adj: &Adjunction, gamma: &GammaOpTrunc) -> Result<Verdict> {
    let delta = doctrinal_mate(g, adj)?;
    let rho = lax_monoidal_to_gamma(g, gamma)?;
    let adjs: Vec<Adjunction> = (0..=gamma.bound).map(|n| power_adjunction(adj, n)).collect::<Result<_>>()?;
    let interval = Arc::new(simplex(1));
    let step = interval.arrow(0, 1).expect("0 -> 1");
    let dp: Vec<Power> = (0..=gamma.bound).map(|n| Power::new(&g.target.carrier, n)).collect();
    let cp: Vec<Power> = (0..=gamma.bound).map(|n| Power::new(&g.source.carrier, n)).collect();
    for (k, f) in gamma.maps.iter().enumerate() {
        if gamma.cat.is_identity(k) {
            continue;
        }
        let mor = interval
            .morphism_ids()
            .map(|m| if m == step { k } else { gamma.cat.id(if interval.src(m) == 0 { f.from } else { f.to }) })
            .collect();
        let pick = FinFunctor::new(interval.clone(), gamma.cat.clone(), vec![f.from, f.to], mor)?;
        let local = rho.pullback(&pick)?;
        let lambda = mate_via_dualization(&local, &[adjs[f.from].clone(), adjs[f.to].clone()])?;
        let cell = &lambda.cells[step];
        let pre: Vec<Vec<usize>> = (0..f.to).map(|j| f.preimage(j)).collect();
        for y in dp[f.from].cat.objects() {
            let ys = dp[f.from].obj_parts(y);
            let expected = cp[f.to].mor(&pre.iter().map(|p| delta.delta_iterated(&p.iter().map(|&i| ys[i]).collect::<Vec<_>>())).collect::<Vec<_>>());
            if cell.component(y) != expected {
                return Ok(Verdict::fail(format!("mate over {} differs at {}", gamma.cat.morphism_name(k), dp[f.from].cat.object_name(y))));
            }
        }
        if f.is_inert() && !cell.is_iso() {
            return Ok(Verdict::fail(format!("mate over inert {} is not invertible", gamma.cat.morphism_name(k))));
        }
    }
    Ok(Verdict::pass())
}

/// Every strict monoidal structure on the posets with `1..=max` elements,
/// up to isomorphism.
pub fn monoidal_posets(max: usize) -> Vec<StrictMonCat> {
    let mut out = Vec::new();
    for n in 1..=max {
        for p in posets_up_to_iso(n) {
            let leq = |a: Obj, b: Obj| p.arrow(a, b).is_some();
            let autos: Vec<Vec<usize>> = permutations(n)
                .into_iter()
                .filter(|s| (0..n).all(|a| (0..n).all(|b| leq(a, b) == leq(s[a], s[b]))))
                .collect();
            let mut seen = std::collections::HashSet::new();
            for unit in 0..n {
                let mut table = vec![vec![usize::MAX; n]; n];
                for (x, cell) in table[unit].iter_mut().enumerate() {
                    *cell = x;
                }
                for (x, row) in table.iter_mut().enumerate() {
                    row[unit] = x;
                }
                let cells: Vec<(usize, usize)> =
                    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| x != unit && y != unit).collect();
                fill(&mut table, &cells, 0, &leq, &mut |t| {
                    let assoc = (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| t[t[x][y]][z] == t[x][t[y][z]])));
                    if !assoc {
                        return;
                    }
                    let code = autos
                        .iter()
                        .map(|s| {
                            let mut inv = vec![0; n];
                            for (a, &b) in s.iter().enumerate() {
                                inv[b] = a;
                            }
                            let flat: Vec<usize> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| s[t[inv[x]][inv[y]]]).collect();
                            (s[unit], flat)
                        })
                        .min()
                        .expect("identity automorphism");
                    if seen.insert(code) {
                        out.push(StrictMonCat::thin(p.clone(), t, unit).expect("monotone associative unital table"));
                    }
                });
            }
        }
    }
    out
}

fn fill(
    table: &mut Vec<Vec<usize>>,
    cells: &[(usize, usize)],
    k: usize,
    leq: &impl Fn(Obj, Obj) -> bool,
    emit: &mut impl FnMut(&[Vec<usize>]),
) {
    if k == cells.len() {
        emit(table);
        return;
    }
    let n = table.len();
    let (x, y) = cells[k];
    for v in 0..n {
        table[x][y] = v;
        // monotone against every filled neighbour in either coordinate
        let ok = (0..n).all(|z| {
            let col = table[z][y];
            let row = table[x][z];
            (col == usize::MAX || ((!leq(z, x) || leq(col, v)) && (!leq(x, z) || leq(v, col))))
                && (row == usize::MAX || ((!leq(z, y) || leq(row, v)) && (!leq(y, z) || leq(v, row))))
        });
        if ok {
            fill(table, cells, k + 1, leq, emit);
        }
    }
    table[x][y] = usize::MAX;
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

/// A lax monoidal structure on a monotone map between monoidal posets, if
/// one exists; it is unique since cells are inequalities.
pub fn thin_lax_structure(c: &StrictMonCat, d: &StrictMonCat, g: &FinFunctor) -> Option<LaxMonFunctor> {
    let dc = &d.carrier;
    let mu = c
        .square
        .cat
        .objects()
        .map(|o| {
            let (x, y) = (c.square.first.obj(o), c.square.second.obj(o));
            dc.arrow(d.tensor_obj(g.obj(x), g.obj(y)), g.obj(c.tensor_obj(x, y)))
        })
        .collect::<Option<Vec<_>>>()?;
    let mu0 = dc.arrow(d.unit, g.obj(c.unit))?;
    LaxMonFunctor::new(c.clone(), d.clone(), g.clone(), mu, mu0).ok()
}

/// Lax monoidal right adjoints between the monoidal posets with at most
/// `max` elements, paired with their adjunctions.
pub fn lax_monoidal_corpus(max: usize) -> Result<Vec<(LaxMonFunctor, Adjunction)>> {
    let cats = monoidal_posets(max);
    let mut out = Vec::new();
    for c in &cats {
        for d in &cats {
            for_each_lax_right_adjoint(c, d, |g| {
                let lax = thin_lax_structure(c, d, &g).expect("lax inequalities hold");
                let adj = find_left_adjoint(&g).expect("least solutions exist");
                out.push((lax, adj));
            })?;
        }
    }
    Ok(out)
}

/// Monotone maps between monoidal posets satisfying the lax inequalities
/// and having a left adjoint, by direct enumeration of object maps.
fn for_each_lax_right_adjoint(c: &StrictMonCat, d: &StrictMonCat, mut emit: impl FnMut(FinFunctor)) -> Result<()> {
    let (cc, dc) = (&c.carrier, &d.carrier);
    let (m, n) = (cc.num_objects(), dc.num_objects());
    let le_c: Vec<Vec<bool>> = (0..m).map(|x| (0..m).map(|y| cc.arrow(x, y).is_some()).collect()).collect();
    let le_d: Vec<Vec<bool>> = (0..n).map(|x| (0..n).map(|y| dc.arrow(x, y).is_some()).collect()).collect();
    let mut g = vec![0usize; m];
    loop {
        let monotone = (0..m).all(|x| (0..m).all(|y| !le_c[x][y] || le_d[g[x]][g[y]]));
        let lax = monotone
            && le_d[d.unit][g[c.unit]]
            && (0..m).all(|x| (0..m).all(|y| le_d[d.tensor_obj(g[x], g[y])][g[c.tensor_obj(x, y)]]));
        // each y needs a least x with y <= g x
        let adjoint = lax
            && (0..n).all(|y| {
                let above: Vec<usize> = (0..m).filter(|&x| le_d[y][g[x]]).collect();
                above.iter().any(|&x| above.iter().all(|&z| le_c[x][z]))
            });
        if adjoint {
            emit(FinFunctor::into_thin(cc.clone(), dc.clone(), g.clone())?);
        }
        if !advance_digits(&mut g, n) {
            return Ok(());
        }
    }
}

fn advance_digits(digits: &mut [usize], base: usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < base {
            return true;
        }
        digits[k] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FinCat> {
        Arc::new(simplex(n))
    }

    fn max_poset(n: usize) -> StrictMonCat {
        let table: Vec<Vec<Obj>> = (0..=n).map(|x| (0..=n).map(|y| x.max(y)).collect()).collect();
        StrictMonCat::thin(chain(n), &table, 0).unwrap()
    }

    fn min_poset(n: usize) -> StrictMonCat {
        let table: Vec<Vec<Obj>> = (0..=n).map(|x| (0..=n).map(|y| x.min(y)).collect()).collect();
        StrictMonCat::thin(chain(n), &table, n).unwrap()
    }

    /// `Z/k` as a one-object category with the group law as tensor.
    fn cyclic(k: usize) -> StrictMonCat {
        let z = Arc::new(FinCat::cyclic_group(k));
        let square = product(&z, &z);
        let mor = square
            .cat
            .morphism_ids()
            .map(|m| {
                let (a, b) = (square.first.mor(m), square.second.mor(m));
                (0..k).find(|&c| z.compose(a, b) == c).unwrap()
            })
            .collect();
        StrictMonCat::new(z, vec![0], mor, 0).unwrap()
    }

    #[test]
    fn truncated_gamma() {
        let g1 = gamma_op_truncated(1);
        assert_eq!(g1.cat.num_objects(), 2);
        assert_eq!(g1.cat.hom(1, 1).len(), 2);
        // <0> is a zero object
        let g3 = gamma_op_truncated(3);
        for n in 0..=3 {
            assert_eq!(g3.cat.hom(0, n).len(), 1);
            assert_eq!(g3.cat.hom(n, 0).len(), 1);
        }
        for n in 1..=3 {
            let rho: Vec<Mor> = (0..n).map(|i| g3.projection(n, i)).collect();
            assert_eq!(rho.len(), n);
            assert!(rho.iter().all(|&r| g3.inert.contains(r)));
            let inert_to_one = g3.cat.hom(n, 1).iter().filter(|&&m| g3.inert.contains(m)).count();
            assert_eq!(inert_to_one, n);
        }
        assert_eq!(g3.cat.num_morphisms(), 144);
    }

    #[test]
    fn segal_diagrams() {
        let gamma = gamma_op_truncated(3);
        let pt = StrictMonCat::thin(chain(0), &[vec![0]], 0).unwrap();
        let d = mon_cat_to_gamma_diagram(&pt, &gamma).unwrap();
        assert!(d.values.iter().all(|v| v.num_objects() == 1 && v.num_morphisms() == 1));
        let m = max_poset(1);
        let d = mon_cat_to_gamma_diagram(&m, &gamma).unwrap();
        assert_eq!(d.value(2).num_objects(), 4);
        assert!(segal_condition_check(&gamma, &d).passed);
        // the active map <2> -> <1> is the tensor
        let fold = gamma.map_index(&PartialMap { from: 2, to: 1, image: vec![Some(0), Some(0)] }).unwrap();
        assert_eq!(d.functor(fold).object_map(), &[0, 1, 1, 1]);
        let constant = CatDiagram::constant(&gamma.cat, &m.carrier);
        let v = segal_condition_check(&gamma, &constant);
        assert_eq!(v.witness.as_deref(), Some("<0>"));
        // shift by one extra point: <n> ↦ M^(n+1), a coherent diagram that
        // fails already at <0>
        let small = gamma_op_truncated(2);
        let mor = small
            .maps
            .iter()
            .map(|f| {
                let mut image = f.image.clone();
                image.push(Some(f.to));
                gamma.map_index(&PartialMap { from: f.from + 1, to: f.to + 1, image }).unwrap()
            })
            .collect();
        let shift = FinFunctor::new(small.cat.clone(), gamma.cat.clone(), vec![1, 2, 3], mor).unwrap();
        let shifted = d.pullback(&shift).unwrap();
        assert_eq!(segal_condition_check(&small, &shifted).witness.as_deref(), Some("<0>"));
    }

    #[test]
    fn galois_connection_adjoints_at_every_level() {
        let gamma = gamma_op_truncated(2);
        let (c, d) = (max_poset(1), max_poset(2));
        let g = FinFunctor::into_thin(c.carrier.clone(), d.carrier.clone(), vec![0, 2]).unwrap();
        let lax = thin_lax_structure(&c, &d, &g).unwrap();
        let rho = lax_monoidal_to_gamma(&lax, &gamma).unwrap();
        let report = fibrewise_adjoint_check(&gamma, &rho).unwrap();
        assert!(report.verdict.passed);
        assert_eq!(report.adjunctions.len(), 3);
        // the identity
        let id = thin_lax_structure(&d, &d, &FinFunctor::identity(&d.carrier)).unwrap();
        assert!(fibrewise_adjoint_check(&gamma, &lax_monoidal_to_gamma(&id, &gamma).unwrap()).unwrap().verdict.passed);
        // [1] -> [2] onto {0, 1} misses the top, so it has no left adjoint
        let h = FinFunctor::into_thin(c.carrier.clone(), d.carrier.clone(), vec![0, 1]).unwrap();
        let lax = thin_lax_structure(&c, &d, &h).unwrap();
        let report = fibrewise_adjoint_check(&gamma, &lax_monoidal_to_gamma(&lax, &gamma).unwrap()).unwrap();
        assert!(!report.verdict.passed);
        assert!(report.verdict.witness.unwrap().contains("<1>"));
    }

    #[test]
    fn doctrinal_mates_of_simple_functors() {
        let d = max_poset(2);
        let id = thin_lax_structure(&d, &d, &FinFunctor::identity(&d.carrier)).unwrap();
        let adj = Adjunction::identity(&d.carrier);
        let delta = doctrinal_mate(&id, &adj).unwrap();
        assert!(delta.delta.is_identity() && d.carrier.is_identity(delta.delta0));
        assert!(doctrinal_round_trip(&id, &adj).unwrap().passed);
        // Z/3 with the identity functor and μ the generator: the unit law
        // forces μ0 = μ^{-1}, and with the identity adjunction δ is μ itself
        let z = cyclic(3);
        let g = z.carrier.morphism_ids().find(|&m| !z.carrier.is_identity(m)).unwrap();
        let inv = z.carrier.inverse(g).unwrap();
        let strong = LaxMonFunctor::new(z.clone(), z.clone(), FinFunctor::identity(&z.carrier), vec![g], inv).unwrap();
        assert!(strong.is_strong());
        let adj = Adjunction::identity(&z.carrier);
        let delta = doctrinal_mate(&strong, &adj).unwrap();
        assert!(delta.is_strong());
        assert_eq!(delta.delta.components(), &[g]);
        assert_eq!(delta.delta0, inv);
        assert!(doctrinal_round_trip(&strong, &adj).unwrap().passed);
        // a different μ on the same functor is not recovered
        let other = LaxMonFunctor::new(z.clone(), z.clone(), FinFunctor::identity(&z.carrier), vec![inv], g).unwrap();
        let back = lax_of_oplax(&doctrinal_mate(&other, &adj).unwrap(), &adj).unwrap();
        assert!(!lax_mon_agree(&back, &strong).passed);
        // an incoherent μ is rejected
        assert!(matches!(
            LaxMonFunctor::new(z.clone(), z.clone(), FinFunctor::identity(&z.carrier), vec![g], g),
            Err(Error::IncoherentLaxStructure(_))
        ));
    }

    #[test]
    fn galois_connection_on_max_monoid() {
        // [1] ↪ [2] onto {0, 2}, both under max with unit 0; left adjoint rounds up
        let (c, d) = (max_poset(1), max_poset(2));
        let g = FinFunctor::into_thin(c.carrier.clone(), d.carrier.clone(), vec![0, 2]).unwrap();
        let lax = thin_lax_structure(&c, &d, &g).unwrap();
        let adj = find_left_adjoint(&g).unwrap();
        let delta = doctrinal_mate(&lax, &adj).unwrap();
        assert!(delta.is_strong());
        assert!(doctrinal_round_trip(&lax, &adj).unwrap().passed);
        assert!(gamma_agreement_check(&lax, &adj, &gamma_op_truncated(3)).unwrap().passed);
    }

    #[test]
    fn strong_right_adjoint_with_oplax_left_adjoint() {
        // ([1], min, 1) -> pt is strong, but its left adjoint picks the bottom
        // object, which is not the unit
        let c = min_poset(1);
        let pt = StrictMonCat::thin(chain(0), &[vec![0]], 0).unwrap();
        let g = FinFunctor::constant(&c.carrier, &pt.carrier, 0);
        let lax = thin_lax_structure(&c, &pt, &g).unwrap();
        assert!(lax.is_strong());
        let adj = find_left_adjoint(&g).unwrap();
        let delta = doctrinal_mate(&lax, &adj).unwrap();
        assert!(!c.carrier.is_iso(delta.delta0));
        assert!(doctrinal_round_trip(&lax, &adj).unwrap().passed);
        assert!(gamma_agreement_check(&lax, &adj, &gamma_op_truncated(2)).unwrap().passed);
    }

    #[test]
    fn small_monoidal_posets() {
        // one structure on a point, and on [1]: max with unit 0, min with
        // unit 1; on two discrete points: the group Z/2 and the monoid
        // {1, a} with a² = a
        let counts: Vec<usize> = (1..=2).map(|n| monoidal_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 5]);
    }
}
