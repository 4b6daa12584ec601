//! Diagrams of categories as normalized pseudofunctors, their Grothendieck
//! constructions (covariant, contravariant and the two-variable mixed
//! version), straightening back from fibrations, and left Kan extension of
//! finite presheaves.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fibrations::{classify, is_isofibration, isofibrant_replacement, Direction, FibredFunctor, Lens};
use crate::fincat::{equivalent_over_base, opposite, product, FinCat, FinFunctor, Mor, Morphism, Obj, Product};

/// A normalized pseudofunctor `index -> Cat`: identities go to identity
/// functors on the nose, and each composable pair `(g, f)` carries an
/// invertible compositor `D(g∘f) => D(g)∘D(f)`. Compositors that are
/// identities are not stored.
#[derive(Clone, Debug)]
pub struct CatDiagram {
    pub index: Arc<FinCat>,
    pub values: Vec<Arc<FinCat>>,
    pub functors: Vec<FinFunctor>,
    compositors: HashMap<(Mor, Mor), Vec<Mor>>,
}

impl CatDiagram {
    pub fn new(
        index: Arc<FinCat>,
        values: Vec<Arc<FinCat>>,
        functors: Vec<FinFunctor>,
        compositors: HashMap<(Mor, Mor), Vec<Mor>>,
    ) -> Result<Self> {
        let bad = |s: String| Err(Error::InvalidDiagram(s));
        if values.len() != index.num_objects() || functors.len() != index.num_morphisms() {
            return bad("one value per object and one functor per arrow are required".into());
        }
        for f in index.morphism_ids() {
            let func = &functors[f];
            if **func.source() != *values[index.src(f)] || **func.target() != *values[index.dst(f)] {
                return bad(format!("functor for {} has the wrong endpoints", index.morphism_name(f)));
            }
        }
        let mut d = CatDiagram { index, values, functors, compositors: HashMap::new() };
        for ((g, f), comps) in compositors {
            if d.index.try_compose(g, f).is_none() {
                return bad("compositor for a non-composable pair".into());
            }
            let c = &d.values[d.index.dst(g)];
            if !comps.iter().all(|&m| c.is_identity(m)) {
                d.compositors.insert((g, f), comps);
            }
        }
        d.check_coherence()?;
        Ok(d)
    }

    /// A diagram whose compositors are all identities.
    pub fn strict(index: Arc<FinCat>, values: Vec<Arc<FinCat>>, functors: Vec<FinFunctor>) -> Result<Self> {
        CatDiagram::new(index, values, functors, HashMap::new())
    }

    /// The constant diagram at `value`.
    pub fn constant(index: &Arc<FinCat>, value: &Arc<FinCat>) -> CatDiagram {
        let functors = index.morphism_ids().map(|_| FinFunctor::identity(value)).collect();
        let values = index.objects().map(|_| value.clone()).collect();
        CatDiagram::strict(index.clone(), values, functors).expect("constant diagrams are strict")
    }

    pub fn value(&self, a: Obj) -> &Arc<FinCat> {
        &self.values[a]
    }

    pub fn functor(&self, f: Mor) -> &FinFunctor {
        &self.functors[f]
    }

    pub fn is_strict(&self) -> bool {
        self.compositors.is_empty()
    }

    /// The component at `x` of the compositor `D(g∘f) => D(g)∘D(f)`.
    pub fn compositor(&self, g: Mor, f: Mor, x: Obj) -> Mor {
        match self.compositors.get(&(g, f)) {
            Some(c) => c[x],
            None => {
                let gf = self.index.compose(g, f);
                self.values[self.index.dst(g)].id(self.functors[gf].obj(x))
            }
        }
    }

    pub fn compositor_inverse(&self, g: Mor, f: Mor, x: Obj) -> Mor {
        let c = &self.values[self.index.dst(g)];
        c.inverse(self.compositor(g, f, x)).expect("compositors are invertible")
    }

    fn check_coherence(&self) -> Result<()> {
        let bad = |s: String| Err(Error::IncoherentDiagram(s));
        let i = &self.index;
        for a in i.objects() {
            let f = &self.functors[i.id(a)];
            if f.object_map().iter().enumerate().any(|(x, &y)| x != y)
                || f.morphism_map().iter().enumerate().any(|(m, &n)| m != n)
            {
                return bad(format!("identity of {} is not sent to an identity functor", i.object_name(a)));
            }
        }
        for f in i.morphism_ids() {
            for &g in i.out_of(i.dst(f)) {
                let gf = i.compose(g, f);
                let src = &self.values[i.src(f)];
                let tgt = &self.values[i.dst(g)];
                let (dg, df, dgf) = (&self.functors[g], &self.functors[f], &self.functors[gf]);
                let stored = self.compositors.get(&(g, f));
                if stored.is_some() && (i.is_identity(f) || i.is_identity(g)) {
                    return bad(format!(
                        "compositor at an identity ({}, {}) is not trivial",
                        i.morphism_name(g),
                        i.morphism_name(f)
                    ));
                }
                if let Some(c) = stored {
                    if c.len() != src.num_objects() {
                        return bad("compositor has the wrong number of components".into());
                    }
                }
                for x in src.objects() {
                    let comp = self.compositor(g, f, x);
                    let (s, t) = (dgf.obj(x), dg.obj(df.obj(x)));
                    if comp >= tgt.num_morphisms() || tgt.src(comp) != s || tgt.dst(comp) != t || !tgt.is_iso(comp) {
                        return bad(format!(
                            "compositor ({}, {}) at {} is not an isomorphism D(gf)x -> D(g)D(f)x",
                            i.morphism_name(g),
                            i.morphism_name(f),
                            src.object_name(x)
                        ));
                    }
                }
                for k in src.morphism_ids() {
                    let (x, y) = (src.src(k), src.dst(k));
                    let lhs = tgt.compose(dg.mor(df.mor(k)), self.compositor(g, f, x));
                    let rhs = tgt.compose(self.compositor(g, f, y), dgf.mor(k));
                    if lhs != rhs {
                        return bad(format!(
                            "compositor ({}, {}) is not natural at {}",
                            i.morphism_name(g),
                            i.morphism_name(f),
                            src.morphism_name(k)
                        ));
                    }
                }
                for &h in i.out_of(i.dst(g)) {
                    let (hg, dh) = (i.compose(h, g), &self.functors[h]);
                    let end = &self.values[i.dst(h)];
                    for x in src.objects() {
                        let lhs = end.compose(dh.mor(self.compositor(g, f, x)), self.compositor(h, gf, x));
                        let rhs = end.compose(self.compositor(h, g, df.obj(x)), self.compositor(hg, f, x));
                        if lhs != rhs {
                            return bad(format!(
                                "compositors are not associative at ({}, {}, {}) and {}",
                                i.morphism_name(h),
                                i.morphism_name(g),
                                i.morphism_name(f),
                                src.object_name(x)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction along a functor into the index category.
    pub fn pullback(&self, h: &FinFunctor) -> Result<CatDiagram> {
        assert!(**h.target() == *self.index, "functor does not land in the index category");
        let j = h.source();
        let values = j.objects().map(|o| self.values[h.obj(o)].clone()).collect();
        let functors = j.morphism_ids().map(|m| self.functors[h.mor(m)].clone()).collect();
        let mut compositors = HashMap::new();
        for u in j.morphism_ids() {
            for &v in j.out_of(j.dst(u)) {
                if let Some(c) = self.compositors.get(&(h.mor(v), h.mor(u))) {
                    compositors.insert((v, u), c.clone());
                }
            }
        }
        CatDiagram::new(j.clone(), values, functors, compositors)
    }

    /// Post-composition with `op: Cat -> Cat`.
    pub fn opposite_values(&self) -> CatDiagram {
        let values: Vec<Arc<FinCat>> = self.values.iter().map(|v| Arc::new(opposite(v))).collect();
        let functors = self
            .index
            .morphism_ids()
            .map(|f| {
                let (s, t) = (self.index.src(f), self.index.dst(f));
                self.functors[f].opposite().with_categories(values[s].clone(), values[t].clone())
            })
            .collect();
        let compositors = self
            .compositors
            .iter()
            .map(|(&(g, f), comps)| {
                let c = &self.values[self.index.dst(g)];
                ((g, f), comps.iter().map(|&m| c.inverse(m).expect("invertible")).collect())
            })
            .collect();
        CatDiagram::new(self.index.clone(), values, functors, compositors).expect("opposites of coherent diagrams")
    }
}

/// A Grothendieck construction: the total category, its projection, and
/// for each object and arrow the pair of index and fiber data it stands for.
#[derive(Clone, Debug)]
pub struct Grothendieck {
    pub total: Arc<FinCat>,
    pub proj: FinFunctor,
    /// Per object `(a, x)` with `x` an object of the value at `a`.
    pub objects: Vec<(Obj, Obj)>,
    /// Per arrow `(f, φ)`; `φ` lives in the value at the target for the
    /// covariant construction and at the source for the contravariant one.
    pub morphisms: Vec<(Mor, Mor)>,
}

impl Grothendieck {
    pub fn object_for(&self, a: Obj, x: Obj) -> Option<Obj> {
        self.objects.iter().position(|&o| o == (a, x))
    }

    /// The arrow `src -> dst` with components `(f, φ)`. In the
    /// contravariant construction `(f, φ)` alone does not fix the target.
    pub fn morphism_for(&self, src: Obj, dst: Obj, f: Mor, phi: Mor) -> Option<Mor> {
        self.total.hom(src, dst).iter().copied().find(|&m| self.morphisms[m] == (f, phi))
    }
}

/// The covariant Grothendieck construction: objects `(a, x)`, arrows
/// `(f: a -> a', φ: D(f)x -> x')`, composing through the compositors. Its
/// projection is a cocartesian fibration with fibers the values.
pub fn unstraighten_cc(d: &CatDiagram) -> Result<Grothendieck> {
    let i = &d.index;
    let mut objects = Vec::new();
    let mut names = Vec::new();
    let mut obj_index = HashMap::new();
    for a in i.objects() {
        for x in d.values[a].objects() {
            obj_index.insert((a, x), objects.len());
            objects.push((a, x));
            names.push(format!("({},{})", i.object_name(a), d.values[a].object_name(x)));
        }
    }
    let mut morphisms = Vec::new();
    let mut comps = Vec::new();
    let mut identity = vec![0; objects.len()];
    let mut mor_index = HashMap::new();
    for (o, &(a, x)) in objects.iter().enumerate() {
        for &f in i.out_of(a) {
            let b = i.dst(f);
            let v = &d.values[b];
            let fx = d.functors[f].obj(x);
            for y in v.objects() {
                for &phi in v.hom(fx, y) {
                    let is_id = i.is_identity(f) && v.is_identity(phi);
                    if is_id {
                        identity[o] = morphisms.len();
                    }
                    mor_index.insert((o, f, phi), morphisms.len());
                    morphisms.push(Morphism {
                        name: if is_id {
                            format!("id_{}", names[o])
                        } else {
                            format!("{}|{}@{}", i.morphism_name(f), v.morphism_name(phi), names[o])
                        },
                        src: o,
                        dst: obj_index[&(b, y)],
                    });
                    comps.push((f, phi));
                }
            }
        }
    }
    let srcs: Vec<Obj> = morphisms.iter().map(|m| m.src).collect();
    let total = FinCat::from_table(names, morphisms, identity, |second, first| {
        let (f, phi) = comps[first];
        let (g, psi) = comps[second];
        let x = objects[srcs[first]].1;
        let v = &d.values[i.dst(g)];
        let chi = v.compose(psi, v.compose(d.functors[g].mor(phi), d.compositor(g, f, x)));
        mor_index.get(&(srcs[first], i.compose(g, f), chi)).copied()
    })?;
    let total = Arc::new(total);
    let proj = FinFunctor::new(
        total.clone(),
        i.clone(),
        objects.iter().map(|&(a, _)| a).collect(),
        comps.iter().map(|&(f, _)| f).collect(),
    )?;
    Ok(Grothendieck { total, proj, objects, morphisms: comps })
}

/// The contravariant Grothendieck construction of a diagram indexed by
/// `base^op`: arrows `(a, x) -> (a', x')` are `(f: a -> a', φ: x -> D(f)x')`.
/// Its projection to `base` is a cartesian fibration.
pub fn unstraighten_ct(d: &CatDiagram, base: &Arc<FinCat>) -> Result<Grothendieck> {
    if opposite(base) != *d.index {
        return Err(Error::InvalidDiagram("diagram is not indexed by the opposite of the base".into()));
    }
    let g = unstraighten_cc(&d.opposite_values())?;
    let total = Arc::new(opposite(&g.total));
    let proj = FinFunctor::new(
        total.clone(),
        base.clone(),
        g.proj.object_map().to_vec(),
        g.proj.morphism_map().to_vec(),
    )?;
    Ok(Grothendieck { total, proj, objects: g.objects, morphisms: g.morphisms })
}

/// The order in which a diagram on `A × B^op` is curried before taking
/// Grothendieck constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurryOrder {
    /// Contravariant constructions over `B` for each `a`, then covariant
    /// over `A`.
    AFirst,
    /// Covariant constructions over `A` for each `b`, then contravariant
    /// over `B`.
    BFirst,
}

/// `A × B^op` with the projections, for indexing two-variable diagrams.
pub fn mixed_index(a: &Arc<FinCat>, b: &Arc<FinCat>) -> Product {
    product(a, &Arc::new(opposite(b)))
}

/// The two-variable Grothendieck construction of `D: A × B^op -> Cat`, a
/// functor to `A × B` that is cocartesian over `A` and cartesian over `B`.
pub fn unstraighten_ortho(d: &CatDiagram, a: &Arc<FinCat>, b: &Arc<FinCat>, order: CurryOrder) -> Result<FibredFunctor> {
    let pab = mixed_index(a, b);
    if *pab.cat != *d.index {
        return Err(Error::InvalidDiagram("diagram is not indexed by A × B^op".into()));
    }
    let d = CatDiagram { index: pab.cat.clone(), ..d.clone() };
    let base = product(a, b);
    match order {
        CurryOrder::AFirst => ortho_a_first(&d, a, b, &pab, base),
        CurryOrder::BFirst => ortho_b_first(&d, a, b, &pab, base),
    }
}

fn ortho_a_first(d: &CatDiagram, a: &Arc<FinCat>, b: &Arc<FinCat>, pab: &Product, base: Product) -> Result<FibredFunctor> {
    let bop = pab.second.target().clone();
    let mut slices = Vec::new();
    for ao in a.objects() {
        let incl = FinFunctor::new(
            bop.clone(),
            pab.cat.clone(),
            bop.objects().map(|bo| pab.pair_obj(ao, bo)).collect(),
            bop.morphism_ids().map(|g| pab.pair_mor(a.id(ao), g)).collect(),
        )?;
        slices.push(unstraighten_ct(&d.pullback(&incl)?, b)?);
    }
    let mut functors = Vec::new();
    for f in a.morphism_ids() {
        let (a0, a1) = (a.src(f), a.dst(f));
        let (s, t) = (&slices[a0], &slices[a1]);
        let obj: Vec<Obj> = s
            .objects
            .iter()
            .map(|&(bo, x)| t.object_for(bo, d.functors[pab.pair_mor(f, b.id(bo))].obj(x)).expect("object"))
            .collect();
        let mut mor = Vec::new();
        for m in s.total.morphism_ids() {
            let (g, phi) = s.morphisms[m];
            let (bs, bt) = (b.src(g), b.dst(g));
            let xt = s.objects[s.total.dst(m)].1;
            let f_b = pab.pair_mor(f, b.id(bs));
            let id_g = pab.pair_mor(a.id(a0), g);
            let g_at_a1 = pab.pair_mor(a.id(a1), g);
            let f_bt = pab.pair_mor(f, b.id(bt));
            let v = &d.values[pab.pair_obj(a1, bs)];
            let image = v.compose(
                d.compositor(g_at_a1, f_bt, xt),
                v.compose(d.compositor_inverse(f_b, id_g, xt), d.functors[f_b].mor(phi)),
            );
            let (src, dst) = (obj[s.total.src(m)], obj[s.total.dst(m)]);
            mor.push(t.morphism_for(src, dst, g, image).ok_or_else(|| Error::InvalidDiagram("transport".into()))?);
        }
        functors.push(FinFunctor::new(s.total.clone(), t.total.clone(), obj, mor)?);
    }
    let mut compositors = HashMap::new();
    for f1 in a.morphism_ids() {
        for &f2 in a.out_of(a.dst(f1)) {
            let end = &slices[a.dst(f2)];
            let s = &slices[a.src(f1)];
            let f21 = a.compose(f2, f1);
            let comps: Vec<Mor> = s
                .objects
                .iter()
                .map(|&(bo, x)| {
                    let c = d.compositor(pab.pair_mor(f2, b.id(bo)), pab.pair_mor(f1, b.id(bo)), x);
                    let e = s.object_for(bo, x).expect("object");
                    let (src, dst) = (functors[f21].obj(e), functors[f2].obj(functors[f1].obj(e)));
                    end.morphism_for(src, dst, b.id(bo), c).expect("compositor arrow")
                })
                .collect();
            compositors.insert((f2, f1), comps);
        }
    }
    let values = slices.iter().map(|s| s.total.clone()).collect();
    let outer = unstraighten_cc(&CatDiagram::new(a.clone(), values, functors, compositors)?)?;
    let obj = outer
        .objects
        .iter()
        .map(|&(ao, e)| base.pair_obj(ao, slices[ao].objects[e].0))
        .collect();
    let mor = outer
        .total
        .morphism_ids()
        .map(|m| {
            let (f, eps) = outer.morphisms[m];
            base.pair_mor(f, slices[a.dst(f)].morphisms[eps].0)
        })
        .collect();
    let proj = FinFunctor::new(outer.total.clone(), base.cat.clone(), obj, mor)?;
    FibredFunctor::new(proj, base)
}

fn ortho_b_first(d: &CatDiagram, a: &Arc<FinCat>, b: &Arc<FinCat>, pab: &Product, base: Product) -> Result<FibredFunctor> {
    let bop = pab.second.target().clone();
    let mut slices = Vec::new();
    for bo in b.objects() {
        let incl = FinFunctor::new(
            a.clone(),
            pab.cat.clone(),
            a.objects().map(|ao| pab.pair_obj(ao, bo)).collect(),
            a.morphism_ids().map(|f| pab.pair_mor(f, b.id(bo))).collect(),
        )?;
        slices.push(unstraighten_cc(&d.pullback(&incl)?)?);
    }
    // the arrow g: b -> b' of B, read in B^op, transports the slice at b'
    // to the slice at b
    let mut functors = Vec::new();
    for g in bop.morphism_ids() {
        let (b1, b0) = (bop.src(g), bop.dst(g));
        let (s, t) = (&slices[b1], &slices[b0]);
        let obj: Vec<Obj> = s
            .objects
            .iter()
            .map(|&(ao, x)| t.object_for(ao, d.functors[pab.pair_mor(a.id(ao), g)].obj(x)).expect("object"))
            .collect();
        let mut mor = Vec::new();
        for m in s.total.morphism_ids() {
            let (f, phi) = s.morphisms[m];
            let (as_, at) = (a.src(f), a.dst(f));
            let x = s.objects[s.total.src(m)].1;
            let v = &d.values[pab.pair_obj(at, b0)];
            let f_b0 = pab.pair_mor(f, b.id(b0));
            let g_as = pab.pair_mor(a.id(as_), g);
            let g_at = pab.pair_mor(a.id(at), g);
            let f_b1 = pab.pair_mor(f, b.id(b1));
            let image = v.compose(
                d.functors[g_at].mor(phi),
                v.compose(d.compositor(g_at, f_b1, x), d.compositor_inverse(f_b0, g_as, x)),
            );
            let (src, dst) = (obj[s.total.src(m)], obj[s.total.dst(m)]);
            mor.push(t.morphism_for(src, dst, f, image).ok_or_else(|| Error::InvalidDiagram("transport".into()))?);
        }
        functors.push(FinFunctor::new(s.total.clone(), t.total.clone(), obj, mor)?);
    }
    let mut compositors = HashMap::new();
    for u in bop.morphism_ids() {
        for &v in bop.out_of(bop.dst(u)) {
            let s = &slices[bop.src(u)];
            let end = &slices[bop.dst(v)];
            let vu = bop.compose(v, u);
            let comps: Vec<Mor> = s
                .objects
                .iter()
                .map(|&(ao, x)| {
                    let c = d.compositor(pab.pair_mor(a.id(ao), v), pab.pair_mor(a.id(ao), u), x);
                    let e = s.object_for(ao, x).expect("object");
                    let (src, dst) = (functors[vu].obj(e), functors[v].obj(functors[u].obj(e)));
                    end.morphism_for(src, dst, a.id(ao), c).expect("compositor arrow")
                })
                .collect();
            compositors.insert((v, u), comps);
        }
    }
    let values = slices.iter().map(|s| s.total.clone()).collect();
    let outer = unstraighten_ct(&CatDiagram::new(bop.clone(), values, functors, compositors)?, b)?;
    let obj = outer
        .objects
        .iter()
        .map(|&(bo, e)| base.pair_obj(slices[bo].objects[e].0, bo))
        .collect();
    let mor = outer
        .total
        .morphism_ids()
        .map(|m| {
            let (g, eps) = outer.morphisms[m];
            let bs = outer.objects[outer.total.src(m)].0;
            base.pair_mor(slices[bs].morphisms[eps].0, g)
        })
        .collect();
    let proj = FinFunctor::new(outer.total.clone(), base.cat.clone(), obj, mor)?;
    FibredFunctor::new(proj, base)
}

/// The unique `m` out of the target of `l` with `m ∘ l = h` over `u`.
fn factor_cocartesian(p: &FinFunctor, l: Mor, h: Mor, u: Mor) -> Option<Mor> {
    let x = p.source();
    x.hom(x.dst(l), x.dst(h)).iter().copied().find(|&m| x.compose(m, l) == h && p.mor(m) == u)
}

/// The unique `m` into the source of `r` with `r ∘ m = h` over `u`.
fn factor_cartesian(p: &FinFunctor, r: Mor, h: Mor, u: Mor) -> Option<Mor> {
    let x = p.source();
    x.hom(x.src(h), x.src(r)).iter().copied().find(|&m| x.compose(r, m) == h && p.mor(m) == u)
}

/// Strict fibers of `p` with the maps between total and fiber indices.
struct Fibers {
    cats: Vec<Arc<FinCat>>,
    // total object -> index within its fiber
    obj_pos: Vec<Obj>,
    // total morphism over an identity -> index within its fiber
    mor_pos: HashMap<Mor, Mor>,
    objs: Vec<Vec<Obj>>,
    mors: Vec<Vec<Mor>>,
}

fn fibers(p: &FinFunctor) -> Fibers {
    let mut obj_pos = vec![0; p.source().num_objects()];
    let mut mor_pos = HashMap::new();
    let (mut cats, mut objs, mut mors) = (Vec::new(), Vec::new(), Vec::new());
    for s in p.target().objects() {
        let (cat, o, m) = p.fiber(s);
        for (k, &x) in o.iter().enumerate() {
            obj_pos[x] = k;
        }
        for (k, &f) in m.iter().enumerate() {
            mor_pos.insert(f, k);
        }
        cats.push(Arc::new(cat));
        objs.push(o);
        mors.push(m);
    }
    Fibers { cats, obj_pos, mor_pos, objs, mors }
}

/// The diagram of fibers of a cocartesian fibration, with transport along
/// the least cocartesian lift lying exactly over each arrow (identities
/// for identity arrows). Compositors come from the uniqueness of
/// factorizations through cocartesian arrows. A `p` that is not an
/// isofibration is first replaced by an equivalent one.
pub fn straighten_cc(p: &FinFunctor) -> Result<CatDiagram> {
    if !is_isofibration(p) {
        return straighten_cc(&isofibrant_replacement(p));
    }
    let (x, s) = (p.source(), p.target());
    let cocart = Lens::full(p).marks(Direction::Cocartesian);
    let fib = fibers(p);
    // lift[f][k] for the k-th object over the source of f
    let mut lift = Vec::with_capacity(s.num_morphisms());
    for f in s.morphism_ids() {
        let mut row = Vec::new();
        for &xo in &fib.objs[s.src(f)] {
            let l = if s.is_identity(f) {
                Some(x.id(xo))
            } else {
                x.out_of(xo).iter().copied().find(|&m| p.mor(m) == f && cocart[m])
            };
            row.push(l.ok_or_else(|| {
                Error::NotCocartesian(format!(
                    "no cocartesian lift of {} from {} lying exactly over it",
                    s.morphism_name(f),
                    x.object_name(xo)
                ))
            })?);
        }
        lift.push(row);
    }
    let mut functors = Vec::new();
    for f in s.morphism_ids() {
        let (a, b) = (s.src(f), s.dst(f));
        let obj = (0..fib.objs[a].len()).map(|k| fib.obj_pos[x.dst(lift[f][k])]).collect();
        let mor = fib.mors[a]
            .iter()
            .map(|&m| {
                let (k1, k2) = (fib.obj_pos[x.src(m)], fib.obj_pos[x.dst(m)]);
                let h = x.compose(lift[f][k2], m);
                let n = factor_cocartesian(p, lift[f][k1], h, s.id(b)).expect("cocartesian factorization");
                fib.mor_pos[&n]
            })
            .collect();
        functors.push(FinFunctor::new(fib.cats[a].clone(), fib.cats[b].clone(), obj, mor)?);
    }
    let mut compositors = HashMap::new();
    for f in s.morphism_ids().filter(|&f| !s.is_identity(f)) {
        for &g in s.out_of(s.dst(f)).iter().filter(|&&g| !s.is_identity(g)) {
            let gf = s.compose(g, f);
            let comps = (0..fib.objs[s.src(f)].len())
                .map(|k| {
                    let fx = fib.obj_pos[x.dst(lift[f][k])];
                    let h = x.compose(lift[g][fx], lift[f][k]);
                    let n = factor_cocartesian(p, lift[gf][k], h, s.id(s.dst(g))).expect("cocartesian factorization");
                    fib.mor_pos[&n]
                })
                .collect();
            compositors.insert((g, f), comps);
        }
    }
    CatDiagram::new(s.clone(), fib.cats, functors, compositors)
}

/// The diagram on `base^op` of fibers of a cartesian fibration.
pub fn straighten_ct(p: &FinFunctor) -> Result<CatDiagram> {
    let d = straighten_cc(&p.opposite()).map_err(|e| match e {
        Error::NotCocartesian(s) => Error::NotCocartesian(s.replace("cocartesian", "cartesian")),
        other => other,
    })?;
    let mut back = d.opposite_values();
    back.index = Arc::new(opposite(p.target()));
    Ok(back)
}

/// The diagram on `A × B^op` of fibers of an orthofibration: the arrow
/// `(f, g)` with `f: a -> a'` in `A` and `g: b -> b'` in `B` acts by
/// cocartesian transport along `(f, id)` followed by cartesian transport
/// along `(id, g)`. Like [`straighten_cc`], works up to isofibrant
/// replacement.
pub fn straighten_ortho(p: &FibredFunctor) -> Result<CatDiagram> {
    let report = classify(p);
    if !report.ortho {
        return Err(Error::NotOrtho(format!("{:?}", report.witnesses_for("ortho"))));
    }
    if !is_isofibration(&p.proj) {
        return straighten_ortho(&FibredFunctor::new(isofibrant_replacement(&p.proj), p.base.clone())?);
    }
    let (a, b) = (p.base_a().clone(), p.base_b().clone());
    let base = &p.base;
    let proj = &p.proj;
    let x = proj.source();
    let pab = mixed_index(&a, &b);
    let fib = fibers(proj);
    let cocart = Lens::full(proj).marks(Direction::Cocartesian);
    let cart = Lens::full(proj).marks(Direction::Cartesian);
    let missing = |what: &str, e: Mor, o: Obj| {
        Error::NotOrtho(format!(
            "no {what} lift of {} at {} lying exactly over it",
            base.cat.morphism_name(e),
            x.object_name(o)
        ))
    };
    let cocart_lift = |f: Mor, bo: Obj, xo: Obj| -> Result<Mor> {
        if a.is_identity(f) {
            return Ok(x.id(xo));
        }
        let e = base.pair_mor(f, b.id(bo));
        x.out_of(xo).iter().copied().find(|&m| proj.mor(m) == e && cocart[m]).ok_or_else(|| missing("cocartesian", e, xo))
    };
    let cart_lift = |ao: Obj, g: Mor, yo: Obj| -> Result<Mor> {
        if b.is_identity(g) {
            return Ok(x.id(yo));
        }
        let e = base.pair_mor(a.id(ao), g);
        x.objects()
            .flat_map(|z| x.hom(z, yo).iter().copied())
            .find(|&m| proj.mor(m) == e && cart[m])
            .ok_or_else(|| missing("cartesian", e, yo))
    };
    // transport of a total object along the mixed arrow w = (f, g)
    let transport = |w: Mor, xo: Obj| -> Result<(Mor, Mor)> {
        let (f, g) = (pab.first.mor(w), pab.second.mor(w));
        let l = cocart_lift(f, b.dst(g), xo)?;
        let r = cart_lift(a.dst(f), g, x.dst(l))?;
        Ok((l, r))
    };
    let value_of = |o: Obj| base.pair_obj(pab.first.obj(o), pab.second.obj(o));
    let values: Vec<Arc<FinCat>> = pab.cat.objects().map(|o| fib.cats[value_of(o)].clone()).collect();
    let mut functors = Vec::new();
    for w in pab.cat.morphism_ids() {
        let (s0, s1) = (value_of(pab.cat.src(w)), value_of(pab.cat.dst(w)));
        let lifts: Vec<(Mor, Mor)> = fib.objs[s0].iter().map(|&xo| transport(w, xo)).collect::<Result<_>>()?;
        let obj = lifts.iter().map(|&(_, r)| fib.obj_pos[x.src(r)]).collect();
        let mor = fib.mors[s0]
            .iter()
            .map(|&m| {
                let (k1, k2) = (fib.obj_pos[x.src(m)], fib.obj_pos[x.dst(m)]);
                let (l1, r1) = lifts[k1];
                let (l2, r2) = lifts[k2];
                let mid = factor_cocartesian(proj, l1, x.compose(l2, m), base.cat.id(proj.obj(x.dst(l1))))
                    .expect("cocartesian factorization");
                let n = factor_cartesian(proj, r2, x.compose(mid, r1), base.cat.id(s1)).expect("cartesian factorization");
                fib.mor_pos[&n]
            })
            .collect();
        functors.push(FinFunctor::new(fib.cats[s0].clone(), fib.cats[s1].clone(), obj, mor)?);
    }
    let mut compositors = HashMap::new();
    for w1 in pab.cat.morphism_ids().filter(|&w| !pab.cat.is_identity(w)) {
        for &w2 in pab.cat.out_of(pab.cat.dst(w1)).iter().filter(|&&w| !pab.cat.is_identity(w)) {
            let w21 = pab.cat.compose(w2, w1);
            let (f2, g1) = (pab.first.mor(w2), pab.second.mor(w1));
            let s0 = value_of(pab.cat.src(w1));
            let end = value_of(pab.cat.dst(w2));
            let mut comps = Vec::new();
            for &xo in &fib.objs[s0] {
                let (l1, r1) = transport(w1, xo)?;
                let (l2, r2) = transport(w2, x.src(r1))?;
                let (l, r) = transport(w21, xo)?;
                let y1 = x.dst(l1);
                let n = factor_cocartesian(proj, l1, l, base.pair_mor(f2, b.id(b.dst(g1))))
                    .ok_or_else(|| Error::NotOrtho("cocartesian comparison".into()))?;
                let t = factor_cocartesian(proj, l2, x.compose(n, r1), base.pair_mor(a.id(a.dst(f2)), g1))
                    .ok_or_else(|| Error::NotOrtho("interchange comparison".into()))?;
                let m = factor_cartesian(proj, r, x.compose(t, r2), base.cat.id(end))
                    .ok_or_else(|| Error::NotOrtho("cartesian comparison".into()))?;
                let inv = x.inverse(m).ok_or_else(|| {
                    Error::NotOrtho(format!("interpolating comparison at {} is not invertible", x.object_name(y1)))
                })?;
                comps.push(fib.mor_pos[&inv]);
            }
            compositors.insert((w2, w1), comps);
        }
    }
    CatDiagram::new(pab.cat.clone(), values, functors, compositors)
}

/// Every strict diagram on `index` whose values are drawn from `values`,
/// in lexicographic order of value choices and then functor choices.
pub fn strict_diagrams(index: &Arc<FinCat>, values: &[Arc<FinCat>]) -> Result<Vec<CatDiagram>> {
    let n = index.num_objects();
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    let mut hom_cache: HashMap<(usize, usize), Vec<FinFunctor>> = HashMap::new();
    let arrows: Vec<Mor> = index.morphism_ids().filter(|&f| !index.is_identity(f)).collect();
    loop {
        let vals: Vec<Arc<FinCat>> = choice.iter().map(|&k| values[k].clone()).collect();
        let mut options = Vec::new();
        for &f in &arrows {
            let key = (choice[index.src(f)], choice[index.dst(f)]);
            if let std::collections::hash_map::Entry::Vacant(e) = hom_cache.entry(key) {
                e.insert(crate::fincat::enumerate_functors(&values[key.0], &values[key.1])?);
            }
            options.push(hom_cache[&key].clone());
        }
        let mut assigned: Vec<Option<FinFunctor>> = vec![None; index.num_morphisms()];
        for a in index.objects() {
            assigned[index.id(a)] = Some(FinFunctor::identity(&vals[a]));
        }
        assign_functors(index, &arrows, &options, 0, &mut assigned, &mut |functors| {
            if let Ok(d) = CatDiagram::strict(index.clone(), vals.clone(), functors) {
                out.push(d);
            }
        });
        // next value choice
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < values.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn assign_functors(
    index: &FinCat,
    arrows: &[Mor],
    options: &[Vec<FinFunctor>],
    k: usize,
    assigned: &mut Vec<Option<FinFunctor>>,
    emit: &mut impl FnMut(Vec<FinFunctor>),
) {
    if k == arrows.len() {
        emit(assigned.iter().map(|f| f.clone().expect("assigned")).collect());
        return;
    }
    let f = arrows[k];
    for cand in &options[k] {
        assigned[f] = Some(cand.clone());
        // every composite among assigned arrows must be strict
        let coherent = index.morphism_ids().all(|u| {
            index.out_of(index.dst(u)).iter().all(|&v| {
                let w = index.compose(v, u);
                match (&assigned[u], &assigned[v], &assigned[w]) {
                    (Some(du), Some(dv), Some(dw)) => dv.after(du) == *dw,
                    _ => true,
                }
            })
        });
        if coherent {
            assign_functors(index, arrows, options, k + 1, assigned, emit);
        }
    }
    assigned[f] = None;
}

/// Diagrams on the same index are equivalent when their covariant
/// Grothendieck constructions are equivalent over the index.
pub fn diagrams_equivalent(d: &CatDiagram, e: &CatDiagram) -> Result<bool> {
    if *d.index != *e.index {
        return Ok(false);
    }
    let (gd, ge) = (unstraighten_cc(d)?, unstraighten_cc(e)?);
    let pe = ge.proj.with_categories(ge.total.clone(), gd.proj.target().clone());
    Ok(equivalent_over_base(&gd.proj, &pe)?.is_some())
}

/// A presheaf of finite sets: `action[f]` maps the set at the target of
/// `f` to the set at its source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presheaf {
    pub base: Arc<FinCat>,
    pub sets: Vec<Vec<String>>,
    pub action: Vec<Vec<usize>>,
}

impl Presheaf {
    pub fn new(base: Arc<FinCat>, sets: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Result<Self> {
        let bad = |s: String| Err(Error::InvalidDiagram(s));
        if sets.len() != base.num_objects() || action.len() != base.num_morphisms() {
            return bad("one set per object and one function per arrow are required".into());
        }
        for f in base.morphism_ids() {
            let (s, t) = (base.src(f), base.dst(f));
            if action[f].len() != sets[t].len() || action[f].iter().any(|&e| e >= sets[s].len()) {
                return bad(format!("action of {} is not a function between the right sets", base.morphism_name(f)));
            }
            if base.is_identity(f) && action[f].iter().enumerate().any(|(i, &e)| i != e) {
                return bad(format!("identity {} does not act trivially", base.morphism_name(f)));
            }
            for &g in base.out_of(t) {
                let gf = base.compose(g, f);
                if (0..sets[base.dst(g)].len()).any(|e| action[gf][e] != action[f][action[g][e]]) {
                    return bad(format!(
                        "action is not functorial at {} ∘ {}",
                        base.morphism_name(g),
                        base.morphism_name(f)
                    ));
                }
            }
        }
        Ok(Presheaf { base, sets, action })
    }

    /// The representable presheaf `hom(-, c)`, with elements named by arrows.
    pub fn representable(base: &Arc<FinCat>, c: Obj) -> Presheaf {
        let sets = base.objects().map(|x| base.hom(x, c).iter().map(|&u| base.morphism_name(u).to_string()).collect()).collect();
        let action = base
            .morphism_ids()
            .map(|f| {
                let (s, t) = (base.src(f), base.dst(f));
                base.hom(t, c)
                    .iter()
                    .map(|&u| {
                        let uf = base.compose(u, f);
                        base.hom(s, c).iter().position(|&v| v == uf).expect("composite")
                    })
                    .collect()
            })
            .collect();
        Presheaf { base: base.clone(), sets, action }
    }

    /// The presheaf with a single element everywhere.
    pub fn terminal(base: &Arc<FinCat>) -> Presheaf {
        Presheaf {
            base: base.clone(),
            sets: base.objects().map(|_| vec!["*".to_string()]).collect(),
            action: base.morphism_ids().map(|_| vec![0]).collect(),
        }
    }

    /// Restriction along `f: C -> D` of a presheaf on `D`.
    pub fn restrict(&self, f: &FinFunctor) -> Presheaf {
        Presheaf {
            base: f.source().clone(),
            sets: f.source().objects().map(|c| self.sets[f.obj(c)].clone()).collect(),
            action: f.source().morphism_ids().map(|m| self.action[f.mor(m)].clone()).collect(),
        }
    }
}

/// Every natural transformation between presheaves on the same base, as
/// per-object functions.
pub fn presheaf_maps(f: &Presheaf, g: &Presheaf) -> Vec<Vec<Vec<usize>>> {
    let c = &f.base;
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = vec![Vec::new(); c.num_objects()];
    fn functions(dom: usize, cod: usize) -> Vec<Vec<usize>> {
        let mut all = vec![Vec::new()];
        for _ in 0..dom {
            all = all
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    (0..cod).map(move |e| {
                        let mut w = v.clone();
                        w.push(e);
                        w
                    })
                })
                .collect();
        }
        all
    }
    fn go(x: usize, f: &Presheaf, g: &Presheaf, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let c = &f.base;
        if x == c.num_objects() {
            out.push(current.clone());
            return;
        }
        for func in functions(f.sets[x].len(), g.sets[x].len()) {
            current[x] = func;
            let natural = c.morphism_ids().filter(|&m| c.src(m).max(c.dst(m)) == x).all(|m| {
                let (s, t) = (c.src(m), c.dst(m));
                (0..f.sets[t].len()).all(|e| current[s][f.action[m][e]] == g.action[m][current[t][e]])
            });
            if natural {
                go(x + 1, f, g, current, out);
            }
        }
        current[x] = Vec::new();
    }
    go(0, f, g, &mut current, &mut out);
    out
}

/// A left Kan extension `f_! F` of a presheaf along `f: C -> D`, computed
/// pointwise as the quotient of `∐_c hom(d, f c) × F(c)` by
/// `(f(k) ∘ u, s) ~ (u, F(k) s)`.
#[derive(Clone, Debug)]
pub struct LeftKan {
    pub presheaf: Presheaf,
    /// Per object of `D`, the least representative `(c, u, s)` of each class.
    pub representatives: Vec<Vec<(Obj, Mor, usize)>>,
    classes: Vec<HashMap<(Obj, Mor, usize), usize>>,
}

impl LeftKan {
    pub fn class_of(&self, d: Obj, c: Obj, u: Mor, s: usize) -> Option<usize> {
        self.classes[d].get(&(c, u, s)).copied()
    }

    /// The unit `F(c) -> (f_! F)(f c)`, `s ↦ [(c, id, s)]`.
    pub fn unit(&self, f: &FinFunctor, c: Obj, s: usize) -> usize {
        let d = f.obj(c);
        self.class_of(d, c, f.target().id(d), s).expect("unit element")
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

pub fn left_kan_presheaf(presheaf: &Presheaf, f: &FinFunctor) -> LeftKan {
    let (c, d) = (f.source(), f.target());
    let mut representatives = Vec::new();
    let mut classes = Vec::new();
    for dd in d.objects() {
        let mut elems = Vec::new();
        for co in c.objects() {
            for &u in d.hom(dd, f.obj(co)) {
                for s in 0..presheaf.sets[co].len() {
                    elems.push((co, u, s));
                }
            }
        }
        let pos: HashMap<(Obj, Mor, usize), usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut parent: Vec<usize> = (0..elems.len()).collect();
        for &(co, u, s) in &elems {
            // k: c' -> c with u = f(k) ∘ u' relates (c, u, s) to (c', u', F(k) s)
            for k in c.morphism_ids().filter(|&k| c.dst(k) == co) {
                let cp = c.src(k);
                for &up in d.hom(dd, f.obj(cp)) {
                    if d.compose(f.mor(k), up) == u {
                        let (i, j) = (pos[&(co, u, s)], pos[&(cp, up, presheaf.action[k][s])]);
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        // representatives are the least elements, listed in increasing order
        let mut reps = Vec::new();
        let mut class_index = HashMap::new();
        let mut root_class = HashMap::new();
        for (i, &e) in elems.iter().enumerate() {
            let r = find(&mut parent, i);
            let k = *root_class.entry(r).or_insert_with(|| {
                reps.push(e);
                reps.len() - 1
            });
            class_index.insert(e, k);
        }
        representatives.push(reps);
        classes.push(class_index);
    }
    let sets = representatives
        .iter()
        .map(|reps| {
            reps.iter()
                .map(|&(co, u, s)| format!("[{},{},{}]", c.object_name(co), d.morphism_name(u), presheaf.sets[co][s]))
                .collect()
        })
        .collect();
    let action = d
        .morphism_ids()
        .map(|v| {
            let (s, t) = (d.src(v), d.dst(v));
            representatives[t]
                .iter()
                .map(|&(co, u, e)| classes[s][&(co, d.compose(u, v), e)])
                .collect()
        })
        .collect();
    LeftKan {
        presheaf: Presheaf { base: d.clone(), sets, action },
        representatives,
        classes,
    }
}

/// The universal property against `g`: composing with the unit gives a
/// bijection from maps `f_! F -> G` to maps `F -> G ∘ f`.
pub fn left_kan_universal(presheaf: &Presheaf, f: &FinFunctor, lan: &LeftKan, g: &Presheaf) -> bool {
    let out = presheaf_maps(&lan.presheaf, g);
    let restricted = g.restrict(f);
    let target = presheaf_maps(presheaf, &restricted);
    let images: Vec<Vec<Vec<usize>>> = out
        .iter()
        .map(|alpha| {
            f.source()
                .objects()
                .map(|co| (0..presheaf.sets[co].len()).map(|s| alpha[f.obj(co)][lan.unit(f, co, s)]).collect())
                .collect()
        })
        .collect();
    let mut distinct = images.clone();
    distinct.sort();
    distinct.dedup();
    distinct.len() == images.len() && images.len() == target.len() && images.iter().all(|i| target.contains(i))
}

/// For each `c`, the comparison `hom(-, f c) -> f_!(hom(-, c))`,
/// `u ↦ [(c, u, id_c)]`, is a bijection, and these comparisons are natural
/// in `c`.
pub fn yoneda_naturality_check(f: &FinFunctor) -> bool {
    yoneda_naturality_check_with(f, left_kan_presheaf)
}

/// As [`yoneda_naturality_check`], with the Kan extension supplied.
pub fn yoneda_naturality_check_with(f: &FinFunctor, lan: impl Fn(&Presheaf, &FinFunctor) -> LeftKan) -> bool {
    let (c, d) = (f.source(), f.target());
    let ext: Vec<LeftKan> = c.objects().map(|co| lan(&Presheaf::representable(c, co), f)).collect();
    let id_pos = |co: Obj| c.hom(co, co).iter().position(|&u| u == c.id(co)).expect("identity");
    for co in c.objects() {
        let e = &ext[co];
        for dd in d.objects() {
            let images: Vec<Option<usize>> =
                d.hom(dd, f.obj(co)).iter().map(|&u| e.class_of(dd, co, u, id_pos(co))).collect();
            let mut seen: Vec<usize> = match images.iter().copied().collect::<Option<Vec<_>>>() {
                Some(v) => v,
                None => return false,
            };
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != images.len() || seen.len() != e.presheaf.sets[dd].len() {
                return false;
            }
        }
        // naturality along k: c -> c'
        for &k in c.out_of(co) {
            let cp = c.dst(k);
            let kpos = c.hom(co, cp).iter().position(|&v| v == k).expect("arrow");
            for dd in d.objects() {
                for &u in d.hom(dd, f.obj(co)) {
                    let via_d = ext[cp].class_of(dd, cp, d.compose(f.mor(k), u), id_pos(cp));
                    // f_!(k) sends [(c, u, id_c)] to [(c, u, k)]
                    let via_c = ext[cp].class_of(dd, co, u, kpos);
                    if via_d.is_none() || via_d != via_c {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::{is_cartesian_fibration, is_cocartesian_fibration};
    use crate::fincat::enumerate_functors;
    use crate::shapes::{arrow_category, simplex};

    fn chain(n: usize) -> Arc<FinCat> {
        Arc::new(simplex(n))
    }

    /// The diagram on `[1]` picking out `u`.
    fn arrow_diagram(u: &FinFunctor) -> CatDiagram {
        let i = chain(1);
        let (c, cp) = (u.source().clone(), u.target().clone());
        let functors = i
            .morphism_ids()
            .map(|m| match (i.src(m), i.dst(m)) {
                (0, 0) => FinFunctor::identity(&c),
                (1, 1) => FinFunctor::identity(&cp),
                _ => u.clone(),
            })
            .collect();
        CatDiagram::strict(i, vec![c, cp], functors).unwrap()
    }

    #[test]
    fn constant_diagram_is_a_product() {
        let a = chain(1);
        let c = Arc::new(FinCat::walking_iso());
        let g = unstraighten_cc(&CatDiagram::constant(&a, &c)).unwrap();
        assert_eq!(g.total.num_objects(), 4);
        assert_eq!(g.total.num_morphisms(), product(&a, &c).cat.num_morphisms());
        assert!(is_cocartesian_fibration(&g.proj));
        let terminal = CatDiagram::constant(&a, &chain(0));
        assert!(unstraighten_cc(&terminal).unwrap().proj.is_isomorphism());
    }

    #[test]
    fn mapping_cylinder_edges() {
        let u = FinFunctor::into_thin(chain(1), chain(0), vec![0, 0]).unwrap();
        let g = unstraighten_cc(&arrow_diagram(&u)).unwrap();
        assert!(is_cocartesian_fibration(&g.proj));
        // (0→1, id) out of each object over 0 is cocartesian
        let i = g.proj.target();
        let f = i.arrow(0, 1).unwrap();
        for x in 0..2 {
            let src = g.object_for(0, x).unwrap();
            let dst = g.object_for(1, 0).unwrap();
            let m = g.morphism_for(src, dst, f, 0).unwrap();
            assert!(crate::fibrations::edge_type(&g.proj, m).cocartesian);
        }
        let back = straighten_cc(&g.proj).unwrap();
        assert_eq!(back.functors[f].object_map(), u.object_map());
        assert!(diagrams_equivalent(&back, &arrow_diagram(&u)).unwrap());
    }

    #[test]
    fn straightening_requires_cocartesian_lifts() {
        let incl = FinFunctor::into_thin(chain(0), chain(1), vec![0]).unwrap();
        assert!(matches!(straighten_cc(&incl), Err(Error::NotCocartesian(_))));
        let sq = product(&chain(1), &chain(0));
        let pr = sq.first.clone();
        let d = straighten_cc(&pr).unwrap();
        assert!(d.is_strict());
        assert!(equivalent_over_base(&unstraighten_cc(&d).unwrap().proj, &pr).unwrap().is_some());
    }

    #[test]
    fn contravariant_round_trip() {
        let c = chain(1);
        let ar = arrow_category(&c);
        // source projection of the arrow category is a cartesian fibration
        let s = FinFunctor::new(
            ar.cat.clone(),
            c.clone(),
            ar.cat.objects().map(|o| ar.base.second.obj(ar.proj.obj(o))).collect(),
            ar.cat.morphism_ids().map(|m| ar.base.second.mor(ar.proj.mor(m))).collect(),
        )
        .unwrap();
        assert!(is_cartesian_fibration(&s));
        let d = straighten_ct(&s).unwrap();
        let back = unstraighten_ct(&d, &c).unwrap();
        assert!(equivalent_over_base(&back.proj, &s).unwrap().is_some());
    }

    #[test]
    fn hom_diagram_unstraightens_to_arrows() {
        let c = chain(1);
        let pab = mixed_index(&c, &c);
        // hom(x, y) for (x, y) in C × C^op... read as a diagram of discrete
        // categories on C × C^op sending (a, b) to hom(b, a)
        let values: Vec<Arc<FinCat>> = pab
            .cat
            .objects()
            .map(|o| {
                let (x, y) = (pab.first.obj(o), pab.second.obj(o));
                Arc::new(FinCat::discrete(c.hom(y, x).iter().map(|&m| c.morphism_name(m).to_string()).collect()))
            })
            .collect();
        let functors = pab
            .cat
            .morphism_ids()
            .map(|w| {
                let (f, g) = (pab.first.mor(w), pab.second.mor(w));
                let (s, t) = (pab.cat.src(w), pab.cat.dst(w));
                let (x, y) = (pab.first.obj(s), pab.second.obj(s));
                let obj = c
                    .hom(y, x)
                    .iter()
                    .map(|&h| {
                        let img = c.compose(f, c.compose(h, g));
                        c.hom(pab.second.obj(t), pab.first.obj(t)).iter().position(|&v| v == img).unwrap()
                    })
                    .collect();
                FinFunctor::into_thin(values[s].clone(), values[t].clone(), obj).unwrap()
            })
            .collect();
        let d = CatDiagram::strict(pab.cat.clone(), values, functors).unwrap();
        let ar = arrow_category(&c);
        for order in [CurryOrder::AFirst, CurryOrder::BFirst] {
            let p = unstraighten_ortho(&d, &c, &c, order).unwrap();
            assert!(classify(&p).ortho);
            // the arrow category projects by (t, s) to C × C
            let q = ar.proj.with_categories(ar.cat.clone(), p.proj.target().clone());
            assert!(equivalent_over_base(&p.proj, &q).unwrap().is_some());
            let back = straighten_ortho(&p).unwrap();
            assert!(diagrams_equivalent(&back, &d).unwrap());
        }
    }

    #[test]
    fn presheaf_kan_extensions() {
        let (c0, c1) = (chain(0), chain(1));
        let at0 = FinFunctor::into_thin(c0.clone(), c1.clone(), vec![0]).unwrap();
        let lan = left_kan_presheaf(&Presheaf::terminal(&c0), &at0);
        // hom(1, 0) is empty in [1]
        assert_eq!(lan.presheaf.sets.iter().map(|s| s.len()).collect::<Vec<_>>(), vec![1, 0]);
        let at1 = FinFunctor::into_thin(c0.clone(), c1.clone(), vec![1]).unwrap();
        let lan1 = left_kan_presheaf(&Presheaf::terminal(&c0), &at1);
        assert_eq!(lan1.presheaf.sets.iter().map(|s| s.len()).collect::<Vec<_>>(), vec![1, 1]);
        let id = FinFunctor::identity(&c1);
        let p = Presheaf::representable(&c1, 1);
        assert_eq!(left_kan_presheaf(&p, &id).presheaf.action, p.action);
        for f in enumerate_functors(&c1, &chain(2)).unwrap() {
            assert!(yoneda_naturality_check(&f));
            let lan = left_kan_presheaf(&p, &f);
            assert!(left_kan_universal(&p, &f, &lan, &Presheaf::terminal(&chain(2))));
        }
    }

    #[test]
    fn corrupted_kan_extension_is_caught() {
        let (c1, c2) = (chain(1), chain(2));
        let f = FinFunctor::into_thin(c1.clone(), c2.clone(), vec![0, 2]).unwrap();
        let corrupt = |p: &Presheaf, f: &FinFunctor| {
            let mut l = left_kan_presheaf(p, f);
            // skip the quotient at the first object: every element is its own class
            let mut keys: Vec<_> = l.classes[0].keys().copied().collect();
            keys.sort();
            l.presheaf.sets[0] = keys.iter().map(|k| format!("{k:?}")).collect();
            l.classes[0] = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
            l
        };
        assert!(!yoneda_naturality_check_with(&f, corrupt));
    }
}
