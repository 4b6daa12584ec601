//! Adjunctions between finite categories, lax and oplax transformations of
//! diagrams, and the mate of a lax transformation with right adjoint
//! components, computed both by the Beck–Chevalley composite and by reading
//! it off the lax collage over `A × [1]`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fibrations::Lens;
use crate::fincat::{natural_transformations, product, FinCat, FinFunctor, Mor, Morphism, NatTrans, Obj, Product};
use crate::grothendieck::{strict_diagrams, CatDiagram};
use crate::shapes::simplex;
use crate::Verdict;

/// `left ⊣ right` with `left: C -> D`, `right: D -> C`, unit
/// `id_C => right ∘ left` and counit `left ∘ right => id_D`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    pub left: FinFunctor,
    pub right: FinFunctor,
    pub unit: NatTrans,
    pub counit: NatTrans,
}

impl Adjunction {
    pub fn new(left: FinFunctor, right: FinFunctor, unit: Vec<Mor>, counit: Vec<Mor>) -> Result<Self> {
        if **left.source() != **right.target() || **left.target() != **right.source() {
            return Err(Error::ShapeMismatch("adjoint functors are not parallel".into()));
        }
        let c = left.source().clone();
        let d = left.target().clone();
        let unit = NatTrans::new(FinFunctor::identity(&c), right.after(&left), unit)?;
        let counit = NatTrans::new(left.after(&right), FinFunctor::identity(&d), counit)?;
        Ok(Adjunction { left, right, unit, counit })
    }

    pub fn identity(c: &Arc<FinCat>) -> Adjunction {
        let id = FinFunctor::identity(c);
        let ids: Vec<Mor> = c.objects().map(|x| c.id(x)).collect();
        Adjunction::new(id.clone(), id, ids.clone(), ids).expect("identity adjunction")
    }

    /// The unit component `x -> right(left(x))`.
    pub fn eta(&self, x: Obj) -> Mor {
        self.unit.component(x)
    }

    /// The counit component `left(right(y)) -> y`.
    pub fn epsilon(&self, y: Obj) -> Mor {
        self.counit.component(y)
    }
}

/// Both triangle identities, checked at every object.
pub fn validate_adjunction(adj: &Adjunction) -> Verdict {
    let (l, r) = (&adj.left, &adj.right);
    let (c, d) = (l.source(), l.target());
    for x in c.objects() {
        let t = d.compose(adj.epsilon(l.obj(x)), l.mor(adj.eta(x)));
        if t != d.id(l.obj(x)) {
            return Verdict::fail(format!("counit ∘ left(unit) is not the identity at {}", c.object_name(x)));
        }
    }
    for y in d.objects() {
        let t = c.compose(r.mor(adj.epsilon(y)), adj.eta(r.obj(y)));
        if t != c.id(r.obj(y)) {
            return Verdict::fail(format!("right(counit) ∘ unit is not the identity at {}", d.object_name(y)));
        }
    }
    Verdict::pass()
}

/// A left adjoint of `g: C -> D`, choosing for each `d` the least universal
/// arrow `d -> g(c)`.
pub fn find_left_adjoint(g: &FinFunctor) -> Result<Adjunction> {
    let (c, d) = (g.source().clone(), g.target().clone());
    let universal = |x: Obj, c0: Obj, eta: Mor| {
        c.objects().all(|cp| {
            d.hom(x, g.obj(cp)).iter().all(|&k| {
                let hs: Vec<Mor> = c.hom(c0, cp).iter().copied().filter(|&h| d.compose(g.mor(h), eta) == k).collect();
                hs.len() == 1
            })
        })
    };
    let mut obj = Vec::new();
    let mut unit = Vec::new();
    for x in d.objects() {
        let choice = c
            .objects()
            .flat_map(|c0| d.hom(x, g.obj(c0)).iter().map(move |&e| (c0, e)))
            .find(|&(c0, e)| universal(x, c0, e));
        let (c0, e) = choice.ok_or_else(|| Error::MissingLeftAdjoint(d.object_name(x).to_string()))?;
        obj.push(c0);
        unit.push(e);
    }
    let unique = |c0: Obj, c1: Obj, eta: Mor, k: Mor| -> Mor {
        let hs: Vec<Mor> = c.hom(c0, c1).iter().copied().filter(|&h| d.compose(g.mor(h), eta) == k).collect();
        hs[0]
    };
    let mor = d
        .morphism_ids()
        .map(|u| {
            let (x, y) = (d.src(u), d.dst(u));
            unique(obj[x], obj[y], unit[x], d.compose(unit[y], u))
        })
        .collect();
    let left = FinFunctor::new(d.clone(), c.clone(), obj.clone(), mor)?;
    let counit = c
        .objects()
        .map(|o| {
            let x = g.obj(o);
            unique(obj[x], o, unit[x], d.id(x))
        })
        .collect();
    Adjunction::new(left, g.clone(), unit, counit)
}

/// A lax transformation `X => Y` of diagrams over `base` with components
/// `G_a: X(a) -> Y(a)` and cells `ρ_f: f_! ∘ G_a => G_a' ∘ f_!`.
#[derive(Clone, Debug)]
pub struct LaxTransformation {
    pub base: Arc<FinCat>,
    pub source: CatDiagram,
    pub target: CatDiagram,
    pub components: Vec<FinFunctor>,
    pub cells: Vec<NatTrans>,
}

/// An oplax transformation `Y => X` with components `F_a: Y(a) -> X(a)` and
/// cells `λ_f: F_a' ∘ f_! => f_! ∘ F_a`.
#[derive(Clone, Debug)]
pub struct OplaxTransformation {
    pub base: Arc<FinCat>,
    pub source: CatDiagram,
    pub target: CatDiagram,
    pub components: Vec<FinFunctor>,
    pub cells: Vec<NatTrans>,
}

fn check_components(base: &FinCat, source: &CatDiagram, target: &CatDiagram, components: &[FinFunctor]) -> Result<()> {
    if *source.index != *base || *target.index != *base {
        return Err(Error::ShapeMismatch("diagrams are not indexed by the base".into()));
    }
    if components.len() != base.num_objects() {
        return Err(Error::ShapeMismatch("one component per object is required".into()));
    }
    for a in base.objects() {
        let g = &components[a];
        if **g.source() != **source.value(a) || **g.target() != **target.value(a) {
            return Err(Error::ShapeMismatch(format!("component at {} has the wrong endpoints", base.object_name(a))));
        }
    }
    Ok(())
}

fn check_cell(cell: &NatTrans, source: &FinFunctor, target: &FinFunctor, what: &str) -> Result<()> {
    if cell.source() != source || cell.target() != target {
        return Err(Error::ShapeMismatch(format!("cell at {what} has the wrong boundary")));
    }
    Ok(())
}

impl LaxTransformation {
    pub fn new(
        source: CatDiagram,
        target: CatDiagram,
        components: Vec<FinFunctor>,
        cells: Vec<NatTrans>,
    ) -> Result<Self> {
        let base = source.index.clone();
        check_components(&base, &source, &target, &components)?;
        if cells.len() != base.num_morphisms() {
            return Err(Error::ShapeMismatch("one cell per arrow is required".into()));
        }
        for f in base.morphism_ids() {
            let (a, b) = (base.src(f), base.dst(f));
            let s = target.functor(f).after(&components[a]);
            let t = components[b].after(source.functor(f));
            check_cell(&cells[f], &s, &t, base.morphism_name(f))?;
        }
        let r = LaxTransformation { base, source, target, components, cells };
        r.check_coherence()?;
        Ok(r)
    }

    /// Cells from per-arrow component lists.
    pub fn from_components(
        source: CatDiagram,
        target: CatDiagram,
        components: Vec<FinFunctor>,
        cells: Vec<Vec<Mor>>,
    ) -> Result<Self> {
        let base = source.index.clone();
        check_components(&base, &source, &target, &components)?;
        if cells.len() != base.num_morphisms() {
            return Err(Error::ShapeMismatch("one cell per arrow is required".into()));
        }
        let cells = base
            .morphism_ids()
            .zip(cells)
            .map(|(f, comps)| {
                let (a, b) = (base.src(f), base.dst(f));
                NatTrans::new(target.functor(f).after(&components[a]), components[b].after(source.functor(f)), comps)
            })
            .collect::<Result<Vec<_>>>()?;
        LaxTransformation::new(source, target, components, cells)
    }

    fn check_coherence(&self) -> Result<()> {
        let (i, x, y) = (&self.base, &self.source, &self.target);
        let bad = |s: String| Err(Error::IncoherentLaxStructure(s));
        for a in i.objects() {
            if !self.cells[i.id(a)].is_identity() {
                return bad(format!("cell at the identity of {} is not an identity", i.object_name(a)));
            }
        }
        for f in i.morphism_ids() {
            for &g in i.out_of(i.dst(f)) {
                let gf = i.compose(g, f);
                let (a, c) = (i.src(f), i.dst(g));
                let v = y.value(c);
                let gc = &self.components[c];
                for xo in x.value(a).objects() {
                    let lhs = v.compose(gc.mor(x.compositor(g, f, xo)), self.cells[gf].component(xo));
                    let fx = x.functor(f).obj(xo);
                    let rhs = v.compose(
                        self.cells[g].component(fx),
                        v.compose(y.functor(g).mor(self.cells[f].component(xo)), y.compositor(g, f, self.components[a].obj(xo))),
                    );
                    if lhs != rhs {
                        return bad(format!(
                            "cells do not compose over {} ∘ {} at {}",
                            i.morphism_name(g),
                            i.morphism_name(f),
                            x.value(a).object_name(xo)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether every cell is invertible.
    pub fn is_strong(&self) -> bool {
        self.cells.iter().all(|c| c.is_iso())
    }

    /// Restriction along a functor into the base.
    pub fn pullback(&self, h: &FinFunctor) -> Result<LaxTransformation> {
        let j = h.source();
        LaxTransformation::new(
            self.source.pullback(h)?,
            self.target.pullback(h)?,
            j.objects().map(|o| self.components[h.obj(o)].clone()).collect(),
            j.morphism_ids().map(|m| self.cells[h.mor(m)].clone()).collect(),
        )
    }
}

impl OplaxTransformation {
    pub fn new(
        source: CatDiagram,
        target: CatDiagram,
        components: Vec<FinFunctor>,
        cells: Vec<NatTrans>,
    ) -> Result<Self> {
        let base = source.index.clone();
        check_components(&base, &source, &target, &components)?;
        if cells.len() != base.num_morphisms() {
            return Err(Error::ShapeMismatch("one cell per arrow is required".into()));
        }
        for f in base.morphism_ids() {
            let (a, b) = (base.src(f), base.dst(f));
            let s = components[b].after(source.functor(f));
            let t = target.functor(f).after(&components[a]);
            check_cell(&cells[f], &s, &t, base.morphism_name(f))?;
        }
        let r = OplaxTransformation { base, source, target, components, cells };
        r.check_coherence()?;
        Ok(r)
    }

    fn check_coherence(&self) -> Result<()> {
        let (i, y, x) = (&self.base, &self.source, &self.target);
        let bad = |s: String| Err(Error::IncoherentLaxStructure(s));
        for a in i.objects() {
            if !self.cells[i.id(a)].is_identity() {
                return bad(format!("cell at the identity of {} is not an identity", i.object_name(a)));
            }
        }
        for f in i.morphism_ids() {
            for &g in i.out_of(i.dst(f)) {
                let gf = i.compose(g, f);
                let (a, c) = (i.src(f), i.dst(g));
                let v = x.value(c);
                for yo in y.value(a).objects() {
                    let lhs = v.compose(x.compositor(g, f, self.components[a].obj(yo)), self.cells[gf].component(yo));
                    let fy = y.functor(f).obj(yo);
                    let rhs = v.compose(
                        x.functor(g).mor(self.cells[f].component(yo)),
                        v.compose(self.cells[g].component(fy), self.components[c].mor(y.compositor(g, f, yo))),
                    );
                    if lhs != rhs {
                        return bad(format!(
                            "cells do not compose over {} ∘ {} at {}",
                            i.morphism_name(g),
                            i.morphism_name(f),
                            y.value(a).object_name(yo)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_strong(&self) -> bool {
        self.cells.iter().all(|c| c.is_iso())
    }
}

fn check_adjunctions(rho: &LaxTransformation, adjs: &[Adjunction]) -> Result<()> {
    if adjs.len() != rho.base.num_objects() {
        return Err(Error::ShapeMismatch("one adjunction per object is required".into()));
    }
    for a in rho.base.objects() {
        if adjs[a].right != rho.components[a] {
            return Err(Error::MissingLeftAdjoint(format!(
                "adjunction at {} is not for the component",
                rho.base.object_name(a)
            )));
        }
    }
    Ok(())
}

/// Left adjoints of every component, found by search.
pub fn left_adjoints(rho: &LaxTransformation) -> Result<Vec<Adjunction>> {
    rho.components
        .iter()
        .enumerate()
        .map(|(a, g)| {
            find_left_adjoint(g).map_err(|e| match e {
                Error::MissingLeftAdjoint(o) => {
                    Error::MissingLeftAdjoint(format!("{} (component at {})", o, rho.base.object_name(a)))
                }
                other => other,
            })
        })
        .collect()
}

/// The Beck–Chevalley mate: `λ_f = ε f_! F ∘ F ρ_f F ∘ F f_! η`.
pub fn mate_of_lax(rho: &LaxTransformation, adjs: &[Adjunction]) -> Result<OplaxTransformation> {
    check_adjunctions(rho, adjs)?;
    let (i, x, y) = (&rho.base, &rho.source, &rho.target);
    let components: Vec<FinFunctor> = adjs.iter().map(|adj| adj.left.clone()).collect();
    let mut cells = Vec::new();
    for f in i.morphism_ids() {
        let (a, b) = (i.src(f), i.dst(f));
        let (fa, fb) = (&adjs[a], &adjs[b]);
        let (vy, vx) = (y.value(b), x.value(b));
        let comps = y
            .value(a)
            .objects()
            .map(|yo| {
                let left_y = fa.left.obj(yo);
                let inner = vy.compose(rho.cells[f].component(left_y), y.functor(f).mor(fa.eta(yo)));
                vx.compose(fb.epsilon(x.functor(f).obj(left_y)), fb.left.mor(inner))
            })
            .collect();
        cells.push(NatTrans::new(
            components[b].after(y.functor(f)),
            x.functor(f).after(&components[a]),
            comps,
        )?);
    }
    OplaxTransformation::new(y.clone(), x.clone(), components, cells)
}

/// The converse mate: `ρ_f = G f_! ε ∘ G λ_f G ∘ η f_! G`.
pub fn mate_of_oplax(lambda: &OplaxTransformation, adjs: &[Adjunction]) -> Result<LaxTransformation> {
    let (i, y, x) = (&lambda.base, &lambda.source, &lambda.target);
    if adjs.len() != i.num_objects() || i.objects().any(|a| adjs[a].left != lambda.components[a]) {
        return Err(Error::ShapeMismatch("adjunctions do not match the components".into()));
    }
    let components: Vec<FinFunctor> = adjs.iter().map(|adj| adj.right.clone()).collect();
    let mut cells = Vec::new();
    for f in i.morphism_ids() {
        let (a, b) = (i.src(f), i.dst(f));
        let (fa, fb) = (&adjs[a], &adjs[b]);
        let (vy, vx) = (y.value(b), x.value(b));
        let comps = x
            .value(a)
            .objects()
            .map(|xo| {
                let gx = fa.right.obj(xo);
                let inner = vx.compose(x.functor(f).mor(fa.epsilon(xo)), lambda.cells[f].component(gx));
                vy.compose(fb.right.mor(inner), fb.eta(y.functor(f).obj(gx)))
            })
            .collect();
        cells.push(NatTrans::new(
            y.functor(f).after(&components[a]),
            components[b].after(x.functor(f)),
            comps,
        )?);
    }
    LaxTransformation::new(x.clone(), y.clone(), components, cells)
}

/// The lax collage of `ρ: X => Y`, a functor to `A × [1]` with `Y` over
/// `0` and `X` over `1`. An arrow `(a, 0, y) -> (a', 1, x)` over `f` is a map
/// `f_! y -> G x` in `Y(a')`; composites through `ρ` make it a local
/// orthofibration whose restriction over `A × {0 -> 1}` is the graph of `G`.
#[derive(Clone, Debug)]
pub struct Collage {
    pub base: Product,
    pub proj: FinFunctor,
    /// Per object `(a, side, z)`.
    pub objects: Vec<(Obj, usize, Obj)>,
    /// Per arrow `(f, φ)`, with `φ` in `Y` unless both ends lie over `1`.
    pub morphisms: Vec<(Mor, Mor)>,
}

impl Collage {
    pub fn object(&self, a: Obj, side: usize, z: Obj) -> Obj {
        self.objects.iter().position(|&o| o == (a, side, z)).expect("collage object")
    }

    pub fn morphism(&self, src: Obj, dst: Obj, f: Mor, phi: Mor) -> Option<Mor> {
        self.proj.source().hom(src, dst).iter().copied().find(|&m| self.morphisms[m] == (f, phi))
    }
}

pub fn lax_collage(rho: &LaxTransformation) -> Result<Collage> {
    let (i, x, y) = (&rho.base, &rho.source, &rho.target);
    let value = |a: Obj, side: usize| if side == 0 { y.value(a) } else { x.value(a) };
    let mut objects = Vec::new();
    let mut names = Vec::new();
    for a in i.objects() {
        for side in 0..2 {
            for z in value(a, side).objects() {
                objects.push((a, side, z));
                names.push(format!("({},{},{})", i.object_name(a), side, value(a, side).object_name(z)));
            }
        }
    }
    let pos: HashMap<(Obj, usize, Obj), Obj> = objects.iter().enumerate().map(|(k, &o)| (o, k)).collect();
    let mut morphisms = Vec::new();
    let mut data = Vec::new();
    let mut identity = vec![0; objects.len()];
    for (k, &(a, side, z)) in objects.iter().enumerate() {
        for &f in i.out_of(a) {
            let b = i.dst(f);
            for side2 in side..2 {
                for z2 in value(b, side2).objects() {
                    // the map lives in Y unless both ends are over 1
                    let (start, end, v) = match (side, side2) {
                        (0, 0) => (y.functor(f).obj(z), z2, y.value(b)),
                        (0, _) => (y.functor(f).obj(z), rho.components[b].obj(z2), y.value(b)),
                        _ => (x.functor(f).obj(z), z2, x.value(b)),
                    };
                    for &phi in v.hom(start, end) {
                        let is_id = i.is_identity(f) && side == side2 && v.is_identity(phi);
                        if is_id {
                            identity[k] = morphisms.len();
                        }
                        let dst = pos[&(b, side2, z2)];
                        morphisms.push(Morphism {
                            name: if is_id {
                                format!("id_{}", names[k])
                            } else {
                                format!("{}|{}:{}->{}", i.morphism_name(f), v.morphism_name(phi), names[k], names[dst])
                            },
                            src: k,
                            dst,
                        });
                        data.push((f, phi));
                    }
                }
            }
        }
    }
    let lookup: HashMap<(Obj, Obj, Mor, Mor), Mor> =
        data.iter().enumerate().map(|(m, &(f, phi))| ((morphisms[m].src, morphisms[m].dst, f, phi), m)).collect();
    let ends: Vec<(Obj, Obj)> = morphisms.iter().map(|m| (m.src, m.dst)).collect();
    let total = FinCat::from_table(names, morphisms, identity, |second, first| {
        let ((f, phi), (g, psi)) = (data[first], data[second]);
        let (s, mid) = ends[first];
        let t = ends[second].1;
        let (_, side, z) = objects[s];
        let side_mid = objects[mid].1;
        let side_t = objects[t].1;
        let c = i.dst(g);
        let gf = i.compose(g, f);
        let chi = if side == 1 {
            let v = x.value(c);
            v.compose(psi, v.compose(x.functor(g).mor(phi), x.compositor(g, f, z)))
        } else if side_mid == 0 {
            let v = y.value(c);
            v.compose(psi, v.compose(y.functor(g).mor(phi), y.compositor(g, f, z)))
        } else {
            debug_assert_eq!(side_t, 1);
            let v = y.value(c);
            let xm = objects[mid].2;
            let through = v.compose(rho.cells[g].component(xm), y.functor(g).mor(phi));
            v.compose(
                rho.components[c].mor(psi),
                v.compose(through, y.compositor(g, f, z)),
            )
        };
        lookup.get(&(s, t, gf, chi)).copied()
    })
    .map_err(|e| Error::IncoherentLaxStructure(format!("collage is not a category: {e}")))?;
    let total = Arc::new(total);
    let interval = Arc::new(simplex(1));
    let base = product(i, &interval);
    let step = |s1: usize, s2: usize| interval.arrow(s1, s2).expect("interval arrow");
    let proj = FinFunctor::new(
        total.clone(),
        base.cat.clone(),
        objects.iter().map(|&(a, side, _)| base.pair_obj(a, side)).collect(),
        (0..data.len())
            .map(|m| {
                let (s, t) = ends[m];
                base.pair_mor(data[m].0, step(objects[s].1, objects[t].1))
            })
            .collect(),
    )?;
    Ok(Collage { base, proj, objects, morphisms: data })
}

/// The mate read off the collage: for `y` over `(a, 0)` and `f: a -> a'`,
/// the composite of the locally cocartesian edge `y -> F y` with the
/// cocartesian edge over `(f, 1)` factors through the cocartesian edge over
/// `(f, 0)`, and then through the locally cocartesian edge out of `f_! y`;
/// the last factor is `λ_f(y)`. The adjunction only picks the lifts, which
/// are checked to be (locally) cocartesian.
pub fn mate_via_dualization(rho: &LaxTransformation, adjs: &[Adjunction]) -> Result<OplaxTransformation> {
    check_adjunctions(rho, adjs)?;
    let col = lax_collage(rho)?;
    let (i, x, y) = (&rho.base, &rho.source, &rho.target);
    let t = col.proj.source().clone();
    let lens = Lens::full(&col.proj);
    let edge = |src: Obj, dst: Obj, f: Mor, phi: Mor| {
        col.morphism(src, dst, f, phi).ok_or_else(|| Error::IncoherentLaxStructure("collage edge is missing".into()))
    };
    let not_cocart = |what: &str| Error::NotCocartesian(format!("{what} is not cocartesian in the collage"));
    let components: Vec<FinFunctor> = adjs.iter().map(|adj| adj.left.clone()).collect();
    let mut cells = Vec::new();
    for f in i.morphism_ids() {
        let (a, b) = (i.src(f), i.dst(f));
        let mut comps = Vec::new();
        for yo in y.value(a).objects() {
            let fy = y.functor(f).obj(yo);
            let left_y = adjs[a].left.obj(yo);
            let f_left_y = x.functor(f).obj(left_y);
            let y_a = col.object(a, 0, yo);
            let x_a = col.object(a, 1, left_y);
            let y_b = col.object(b, 0, fy);
            let x_b = col.object(b, 1, f_left_y);
            let top = edge(y_a, x_a, i.id(a), adjs[a].eta(yo))?;
            if !lens.is_locally_cocartesian(top) {
                return Err(not_cocart("the unit edge"));
            }
            let down_y = edge(y_a, y_b, f, y.value(b).id(fy))?;
            let down_x = edge(x_a, x_b, f, x.value(b).id(f_left_y))?;
            if !lens.is_cocartesian(down_y) || !lens.is_cocartesian(down_x) {
                return Err(not_cocart("transport"));
            }
            let around = t.compose(down_x, top);
            let over = col.base.pair_mor(i.id(b), col.base.second.target().arrow(0, 1).expect("0 -> 1"));
            let bottom = t
                .hom(y_b, x_b)
                .iter()
                .copied()
                .find(|&m| col.proj.mor(m) == over && t.compose(m, down_y) == around)
                .ok_or_else(|| not_cocart("the transport of the unit"))?;
            let x_mid = col.object(b, 1, adjs[b].left.obj(fy));
            let local = edge(y_b, x_mid, i.id(b), adjs[b].eta(fy))?;
            if !lens.is_locally_cocartesian(local) {
                return Err(not_cocart("the unit edge after transport"));
            }
            let over_id = col.base.cat.id(col.base.pair_obj(b, 1));
            let m = t
                .hom(x_mid, x_b)
                .iter()
                .copied()
                .find(|&m| col.proj.mor(m) == over_id && t.compose(m, local) == bottom)
                .ok_or_else(|| not_cocart("the unit edge after transport"))?;
            comps.push(col.morphisms[m].1);
        }
        cells.push(NatTrans::new(components[b].after(y.functor(f)), x.functor(f).after(&components[a]), comps)?);
    }
    OplaxTransformation::new(y.clone(), x.clone(), components, cells)
}

/// Cellwise equality of two oplax transformations with the same boundary.
pub fn oplax_agree(l1: &OplaxTransformation, l2: &OplaxTransformation) -> Verdict {
    for f in l1.base.morphism_ids() {
        if l1.cells[f] != l2.cells[f] {
            return Verdict::fail(format!("cells differ over {}", l1.base.morphism_name(f)));
        }
    }
    Verdict::pass()
}

pub fn lax_agree(r1: &LaxTransformation, r2: &LaxTransformation) -> Verdict {
    for f in r1.base.morphism_ids() {
        if r1.cells[f] != r2.cells[f] {
            return Verdict::fail(format!("cells differ over {}", r1.base.morphism_name(f)));
        }
    }
    Verdict::pass()
}

/// The mate of the mate is the original lax transformation.
pub fn double_mate_check(rho: &LaxTransformation, adjs: &[Adjunction]) -> Result<Verdict> {
    let back = mate_of_oplax(&mate_of_lax(rho, adjs)?, adjs)?;
    Ok(lax_agree(&back, rho))
}

/// Every lax transformation between strict diagrams on `base` with values
/// in `fibers` whose components have left adjoints, paired with those
/// adjoints.
pub fn lax_corpus(base: &Arc<FinCat>, fibers: &[Arc<FinCat>]) -> Result<Vec<(LaxTransformation, Vec<Adjunction>)>> {
    let diagrams = strict_diagrams(base, fibers)?;
    let mut out = Vec::new();
    let mut right_adjoints: HashMap<(usize, usize), Vec<(FinFunctor, Adjunction)>> = HashMap::new();
    let fiber_index = |c: &Arc<FinCat>| fibers.iter().position(|f| **f == **c).expect("corpus fiber");
    for (k, g_src) in fibers.iter().enumerate() {
        for (l, g_tgt) in fibers.iter().enumerate() {
            let mut list = Vec::new();
            for g in crate::fincat::enumerate_functors(g_src, g_tgt)? {
                if let Ok(adj) = find_left_adjoint(&g) {
                    list.push((g, adj));
                }
            }
            right_adjoints.insert((k, l), list);
        }
    }
    let arrows: Vec<Mor> = base.morphism_ids().filter(|&f| !base.is_identity(f)).collect();
    for xd in &diagrams {
        for yd in &diagrams {
            let options: Vec<&Vec<(FinFunctor, Adjunction)>> = base
                .objects()
                .map(|a| &right_adjoints[&(fiber_index(xd.value(a)), fiber_index(yd.value(a)))])
                .collect();
            let mut pick = vec![0usize; base.num_objects()];
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            loop {
                let comps: Vec<FinFunctor> = base.objects().map(|a| options[a][pick[a]].0.clone()).collect();
                let adjs: Vec<Adjunction> = base.objects().map(|a| options[a][pick[a]].1.clone()).collect();
                let cell_options: Vec<Vec<Vec<Mor>>> = arrows
                    .iter()
                    .map(|&f| {
                        let (a, b) = (base.src(f), base.dst(f));
                        natural_transformations(&yd.functor(f).after(&comps[a]), &comps[b].after(xd.functor(f)))
                    })
                    .collect();
                let mut cpick = vec![0usize; arrows.len()];
                if cell_options.iter().all(|o| !o.is_empty()) {
                    loop {
                        let cells = base
                            .morphism_ids()
                            .map(|f| match arrows.iter().position(|&g| g == f) {
                                Some(k) => cell_options[k][cpick[k]].clone(),
                                None => {
                                    let b = base.src(f);
                                    xd.value(b).objects().map(|o| yd.value(b).id(comps[b].obj(o))).collect()
                                }
                            })
                            .collect();
                        if let Ok(rho) = LaxTransformation::from_components(xd.clone(), yd.clone(), comps.clone(), cells) {
                            out.push((rho, adjs.clone()));
                        }
                        if !advance(&mut cpick, |k| cell_options[k].len()) {
                            break;
                        }
                    }
                }
                if !advance(&mut pick, |a| options[a].len()) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// The fixed mate corpus: base `[1]` with fibers `[0], [1], [2]` and the
/// walking isomorphism, and base `[2]` with fibers `[0], [1]` and `Z/2`.
pub fn standard_lax_corpus() -> Result<Vec<(LaxTransformation, Vec<Adjunction>)>> {
    let c = |n| Arc::new(simplex(n));
    let mut out = lax_corpus(&c(1), &[c(0), c(1), c(2), Arc::new(FinCat::walking_iso())])?;
    out.extend(lax_corpus(&c(2), &[c(0), c(1), Arc::new(FinCat::cyclic_group(2))])?);
    Ok(out)
}

fn advance(counter: &mut [usize], limit: impl Fn(usize) -> usize) -> bool {
    for k in (0..counter.len()).rev() {
        counter[k] += 1;
        if counter[k] < limit(k) {
            return true;
        }
        counter[k] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FinCat> {
        Arc::new(simplex(n))
    }

    /// The inclusion `[1] -> [2]` onto `{0, 2}`; its left adjoint rounds up.
    fn galois() -> (FinFunctor, Adjunction) {
        let g = FinFunctor::into_thin(chain(1), chain(2), vec![0, 2]).unwrap();
        let adj = find_left_adjoint(&g).unwrap();
        (g, adj)
    }

    #[test]
    fn adjunctions_and_their_triangles() {
        let id = Adjunction::identity(&chain(2));
        assert!(validate_adjunction(&id).passed);
        let (_, adj) = galois();
        assert!(validate_adjunction(&adj).passed);
        // the left adjoint rounds up: 1 ↦ 1 (the top of [1])
        assert_eq!(adj.left.object_map(), &[0, 1, 1]);
        // a retraction that is not adjoint to the inclusion
        let incl = FinFunctor::into_thin(chain(1), chain(2), vec![0, 1]).unwrap();
        assert!(matches!(find_left_adjoint(&incl), Err(Error::MissingLeftAdjoint(_))));
    }

    #[test]
    fn corrupted_counit_is_caught() {
        let c = Arc::new(FinCat::walking_iso());
        let id = FinFunctor::identity(&c);
        let ids: Vec<Mor> = c.objects().map(|x| c.id(x)).collect();
        let adj = Adjunction::new(id.clone(), id.clone(), ids.clone(), ids).unwrap();
        assert!(validate_adjunction(&adj).passed);
        // a nontrivial counit on the identity of Z/2 breaks a triangle
        let z = Arc::new(FinCat::cyclic_group(2));
        let idz = FinFunctor::identity(&z);
        let g = z.morphism_ids().find(|&m| !z.is_identity(m)).unwrap();
        let bad = Adjunction::new(idz.clone(), idz, vec![z.id(0)], vec![g]).unwrap();
        let v = validate_adjunction(&bad);
        assert!(!v.passed && v.witness.unwrap().contains("counit"));
    }

    fn two_step_instance() -> (LaxTransformation, Vec<Adjunction>) {
        // X = Y = constant [2] over [1], G = a closure-style right adjoint
        let a = chain(1);
        let c2 = chain(2);
        let x = CatDiagram::constant(&a, &c2);
        let y = CatDiagram::constant(&a, &c2);
        let g = FinFunctor::into_thin(c2.clone(), c2.clone(), vec![1, 1, 2]).unwrap();
        let comps = vec![g.clone(), g.clone()];
        let cells = a
            .morphism_ids()
            .map(|_| c2.objects().map(|o| c2.id(g.obj(o))).collect::<Vec<_>>())
            .collect();
        let rho = LaxTransformation::from_components(x, y, comps, cells).unwrap();
        let adjs = left_adjoints(&rho).unwrap();
        (rho, adjs)
    }

    #[test]
    fn identity_and_triangle_cases() {
        let a = chain(1);
        let c = chain(2);
        let d = CatDiagram::constant(&a, &c);
        let comps = vec![FinFunctor::identity(&c); 2];
        let cells = a.morphism_ids().map(|_| c.objects().map(|o| c.id(o)).collect()).collect();
        let rho = LaxTransformation::from_components(d.clone(), d, comps, cells).unwrap();
        let adjs = vec![Adjunction::identity(&c); 2];
        let l = mate_of_lax(&rho, &adjs).unwrap();
        assert!(l.cells.iter().all(|c| c.is_identity()));
        assert!(oplax_agree(&l, &mate_via_dualization(&rho, &adjs).unwrap()).passed);
        // identity cells, transport the identity, nontrivial adjunction
        let (rho, adjs) = two_step_instance();
        let l = mate_of_lax(&rho, &adjs).unwrap();
        assert!(l.cells.iter().all(|c| c.is_identity()));
        assert!(oplax_agree(&l, &mate_via_dualization(&rho, &adjs).unwrap()).passed);
        assert!(double_mate_check(&rho, &adjs).unwrap().passed);
    }

    #[test]
    fn noncommuting_galois_square() {
        // X(0) = X(1) = [1], Y(0) = Y(1) = [2]; f_! on X is constant at the
        // top, on Y the identity; G the inclusion {0, 2}. The square commutes
        // only up to the cell f_! G <= G f_!.
        let a = chain(1);
        let (c1, c2) = (chain(1), chain(2));
        let f = a.arrow(0, 1).unwrap();
        let top = FinFunctor::into_thin(c1.clone(), c1.clone(), vec![1, 1]).unwrap();
        let xf: Vec<FinFunctor> = a
            .morphism_ids()
            .map(|m| if m == f { top.clone() } else { FinFunctor::identity(&c1) })
            .collect();
        let x = CatDiagram::strict(a.clone(), vec![c1.clone(), c1.clone()], xf).unwrap();
        let y = CatDiagram::constant(&a, &c2);
        let (g, _) = galois();
        let comps = vec![g.clone(), g.clone()];
        let cells = a
            .morphism_ids()
            .map(|m| {
                c1.objects()
                    .map(|o| {
                        let (s, t) = (g.obj(o), g.obj(x.functor(m).obj(o)));
                        c2.arrow(s, t).unwrap()
                    })
                    .collect()
            })
            .collect();
        let rho = LaxTransformation::from_components(x, y, comps, cells).unwrap();
        assert!(!rho.is_strong());
        let adjs = left_adjoints(&rho).unwrap();
        let l = mate_of_lax(&rho, &adjs).unwrap();
        let dual = mate_via_dualization(&rho, &adjs).unwrap();
        assert!(oplax_agree(&l, &dual).passed);
        // poset cells are unique when they exist
        for yo in c2.objects() {
            let (s, t) = (l.cells[f].source().obj(yo), l.cells[f].target().obj(yo));
            assert_eq!(c1.hom(s, t), &[l.cells[f].component(yo)]);
        }
        assert!(double_mate_check(&rho, &adjs).unwrap().passed);
        let col = lax_collage(&rho).unwrap();
        let p = crate::fibrations::FibredFunctor::new(col.proj, col.base).unwrap();
        assert!(crate::fibrations::classify(&p).local_ortho);
    }

    #[test]
    fn corrupted_round_trip_is_caught() {
        // over [1] with constant value Z/2 and identity components, each
        // group element is a cell, and the mate returns it unchanged
        let a = chain(1);
        let z = Arc::new(FinCat::cyclic_group(2));
        let d = CatDiagram::constant(&a, &z);
        let flip = z.morphism_ids().find(|&m| !z.is_identity(m)).unwrap();
        let f = a.arrow(0, 1).unwrap();
        let with_cell = |c: Mor| {
            let cells = a.morphism_ids().map(|m| vec![if m == f { c } else { z.id(0) }]).collect();
            LaxTransformation::from_components(d.clone(), d.clone(), vec![FinFunctor::identity(&z); 2], cells).unwrap()
        };
        let (plain, flipped) = (with_cell(z.id(0)), with_cell(flip));
        let adjs = vec![Adjunction::identity(&z); 2];
        let l = mate_of_lax(&flipped, &adjs).unwrap();
        assert_eq!(l.cells[f].components(), &[flip]);
        assert!(oplax_agree(&l, &mate_via_dualization(&flipped, &adjs).unwrap()).passed);
        let back = mate_of_oplax(&l, &adjs).unwrap();
        assert!(lax_agree(&back, &flipped).passed);
        assert!(!lax_agree(&back, &plain).passed);
    }

    #[test]
    fn strong_cells_need_not_have_strong_mates() {
        // X: pt -> [1] at the top, Y constant at a point; the square of right
        // adjoints commutes but the mate compares the bottom with the top
        let a = chain(1);
        let (pt, c1) = (chain(0), chain(1));
        let f = a.arrow(0, 1).unwrap();
        let top = FinFunctor::into_thin(pt.clone(), c1.clone(), vec![1]).unwrap();
        let xf = a.morphism_ids().map(|m| if m == f { top.clone() } else if a.src(m) == 0 {
            FinFunctor::identity(&pt)
        } else {
            FinFunctor::identity(&c1)
        });
        let x = CatDiagram::strict(a.clone(), vec![pt.clone(), c1.clone()], xf.collect()).unwrap();
        let y = CatDiagram::constant(&a, &pt);
        let comps = vec![FinFunctor::identity(&pt), FinFunctor::constant(&c1, &pt, 0)];
        let cells = a.morphism_ids().map(|m| vec![pt.id(0); x.value(a.src(m)).num_objects()]).collect();
        let rho = LaxTransformation::from_components(x, y, comps, cells).unwrap();
        assert!(rho.is_strong());
        let adjs = left_adjoints(&rho).unwrap();
        let l = mate_of_lax(&rho, &adjs).unwrap();
        assert!(!l.is_strong());
        assert!(oplax_agree(&l, &mate_via_dualization(&rho, &adjs).unwrap()).passed);
    }

    #[test]
    fn corpus_mates_agree() {
        let fibers = [chain(0), chain(1), Arc::new(FinCat::walking_iso())];
        for (rho, adjs) in lax_corpus(&chain(1), &fibers).unwrap() {
            let l = mate_of_lax(&rho, &adjs).unwrap();
            let dual = mate_via_dualization(&rho, &adjs).unwrap();
            assert!(oplax_agree(&l, &dual).passed);
            assert!(double_mate_check(&rho, &adjs).unwrap().passed);
            // with equivalences as components the mate of an iso is an iso
            if rho.is_strong() && rho.components.iter().all(crate::fincat::is_equivalence) {
                assert!(l.is_strong());
            }
        }
    }
}
