//! Finite categories as explicit tables, plus the exact-search toolkit:
//! functors, natural transformations, wide subcategories, canonical
//! pullbacks, budgeted functor enumeration and equivalence search.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Obj = usize;
pub type Mor = usize;

const NONE: Mor = usize::MAX;

/// Default bound on candidate assignments tried by any exhaustive search.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

static GLOBAL_BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_BUDGET);

/// Sets the budget used by searches that are not given one explicitly.
pub fn set_search_budget(limit: u64) {
    GLOBAL_BUDGET.store(limit, Ordering::Relaxed);
}

pub fn search_budget() -> u64 {
    GLOBAL_BUDGET.load(Ordering::Relaxed)
}

/// Counts candidate assignments against a fixed limit.
#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn global() -> Self {
        Budget::new(search_budget())
    }

    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExceeded(self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub src: Obj,
    pub dst: Obj,
}

/// A finite category. Objects and morphisms are addressed by index; the
/// declared order of each is part of the identity of the category.
#[derive(Clone, PartialEq, Eq)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<Mor>,
    out: Vec<Vec<Mor>>,
    out_pos: Vec<usize>,
    // post[f][out_pos[g]] = g ∘ f
    post: Vec<Vec<Mor>>,
    hom: Vec<Vec<Mor>>,
    inverse: Vec<Option<Mor>>,
}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCat({} objects, {} morphisms)",
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

impl FinCat {
    /// Builds and validates a category from its tables. `compose(g, f)` is
    /// queried for every composable pair and must return `g ∘ f`.
    pub fn from_table(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identity: Vec<Mor>,
        mut compose: impl FnMut(Mor, Mor) -> Option<Mor>,
    ) -> Result<FinCat> {
        let n = objects.len();
        let m = morphisms.len();
        let bad = |s: String| Err(Error::InvalidCategory(s));
        {
            let mut seen = HashMap::new();
            for (i, o) in objects.iter().enumerate() {
                if seen.insert(o.as_str(), i).is_some() {
                    return bad(format!("duplicate object identifier {o}"));
                }
            }
            let mut seen = HashMap::new();
            for (i, f) in morphisms.iter().enumerate() {
                if seen.insert(f.name.as_str(), i).is_some() {
                    return bad(format!("duplicate morphism identifier {}", f.name));
                }
                if f.src >= n || f.dst >= n {
                    return bad(format!("morphism {} has an unknown endpoint", f.name));
                }
            }
        }
        if identity.len() != n {
            return bad("identity table does not cover every object".into());
        }
        for (x, &i) in identity.iter().enumerate() {
            if i >= m || morphisms[i].src != x || morphisms[i].dst != x {
                return bad(format!("identity of {} is not an endomorphism of it", objects[x]));
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut out_pos = vec![0; m];
        let mut hom = vec![Vec::new(); n * n];
        for (i, f) in morphisms.iter().enumerate() {
            out_pos[i] = out[f.src].len();
            out[f.src].push(i);
            hom[f.src * n + f.dst].push(i);
        }
        let mut post = Vec::with_capacity(m);
        for f in 0..m {
            let row: Vec<Mor> = out[morphisms[f].dst]
                .iter()
                .map(|&g| compose(g, f).unwrap_or(NONE))
                .collect();
            for (k, &h) in row.iter().enumerate() {
                let g = out[morphisms[f].dst][k];
                if h == NONE {
                    return bad(format!(
                        "composite {} ∘ {} is undefined",
                        morphisms[g].name, morphisms[f].name
                    ));
                }
                if h >= m || morphisms[h].src != morphisms[f].src || morphisms[h].dst != morphisms[g].dst {
                    return bad(format!(
                        "composite {} ∘ {} has the wrong endpoints",
                        morphisms[g].name, morphisms[f].name
                    ));
                }
            }
            post.push(row);
        }
        let mut cat = FinCat {
            objects,
            morphisms,
            identity,
            out,
            out_pos,
            post,
            hom,
            inverse: vec![None; m],
        };
        for f in 0..m {
            let (s, t) = (cat.src(f), cat.dst(f));
            if cat.compose(cat.identity[t], f) != f || cat.compose(f, cat.identity[s]) != f {
                return bad(format!("identity law fails at {}", cat.morphisms[f].name));
            }
        }
        for f in 0..m {
            for &g in &cat.out[cat.dst(f)] {
                let gf = cat.compose(g, f);
                for &h in &cat.out[cat.dst(g)] {
                    if cat.compose(cat.compose(h, g), f) != cat.compose(h, gf) {
                        return bad(format!(
                            "associativity fails at ({}, {}, {})",
                            cat.morphisms[h].name, cat.morphisms[g].name, cat.morphisms[f].name
                        ));
                    }
                }
            }
        }
        for f in 0..m {
            let (s, t) = (cat.src(f), cat.dst(f));
            cat.inverse[f] = cat
                .hom(t, s)
                .iter()
                .copied()
                .find(|&g| cat.compose(g, f) == cat.identity[s] && cat.compose(f, g) == cat.identity[t]);
        }
        Ok(cat)
    }

    /// A thin category on the given objects; `leq` must be reflexive and
    /// transitive. Identities are named `id_x`, other arrows `x->y`.
    pub fn preorder(objects: Vec<String>, leq: impl Fn(Obj, Obj) -> bool) -> Result<FinCat> {
        let n = objects.len();
        let mut morphisms = Vec::new();
        let mut identity = vec![NONE; n];
        let mut index = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                if leq(x, y) {
                    let name = if x == y {
                        identity[x] = morphisms.len();
                        format!("id_{}", objects[x])
                    } else {
                        format!("{}->{}", objects[x], objects[y])
                    };
                    index.insert((x, y), morphisms.len());
                    morphisms.push(Morphism { name, src: x, dst: y });
                }
            }
        }
        if identity.contains(&NONE) {
            return Err(Error::InvalidCategory("preorder relation is not reflexive".into()));
        }
        let ends: Vec<(Obj, Obj)> = morphisms.iter().map(|f| (f.src, f.dst)).collect();
        FinCat::from_table(objects, morphisms, identity, |g, f| {
            index.get(&(ends[f].0, ends[g].1)).copied()
        })
    }

    pub fn discrete(objects: Vec<String>) -> FinCat {
        FinCat::preorder(objects, |x, y| x == y).expect("discrete category")
    }

    /// Two objects `a`, `b` and a pair of mutually inverse arrows.
    pub fn walking_iso() -> FinCat {
        FinCat::preorder(vec!["a".into(), "b".into()], |_, _| true).expect("walking isomorphism")
    }

    /// The cyclic group of order `n` as a one-object category.
    pub fn cyclic_group(n: usize) -> FinCat {
        assert!(n >= 1);
        let morphisms = (0..n)
            .map(|k| Morphism {
                name: if k == 0 { "id_*".into() } else { format!("g{k}") },
                src: 0,
                dst: 0,
            })
            .collect();
        FinCat::from_table(vec!["*".into()], morphisms, vec![0], |g, f| Some((g + f) % n))
            .expect("cyclic group")
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> std::ops::Range<Obj> {
        0..self.objects.len()
    }

    pub fn morphism_ids(&self) -> std::ops::Range<Mor> {
        0..self.morphisms.len()
    }

    pub fn object_name(&self, x: Obj) -> &str {
        &self.objects[x]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism(&self, f: Mor) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism_name(&self, f: Mor) -> &str {
        &self.morphisms[f].name
    }

    pub fn object_index(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<Mor> {
        self.morphisms.iter().position(|f| f.name == name)
    }

    pub fn src(&self, f: Mor) -> Obj {
        self.morphisms[f].src
    }

    pub fn dst(&self, f: Mor) -> Obj {
        self.morphisms[f].dst
    }

    pub fn id(&self, x: Obj) -> Mor {
        self.identity[x]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.identity[self.src(f)] == f
    }

    /// `g ∘ f`; panics when the pair is not composable.
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        assert_eq!(
            self.dst(f),
            self.src(g),
            "{} ∘ {} is not composable",
            self.morphisms[g].name,
            self.morphisms[f].name
        );
        self.post[f][self.out_pos[g]]
    }

    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        (self.dst(f) == self.src(g)).then(|| self.post[f][self.out_pos[g]])
    }

    /// Composes a path given in diagrammatic order (first arrow first).
    pub fn compose_path(&self, path: &[Mor]) -> Mor {
        let mut acc = path[0];
        for &g in &path[1..] {
            acc = self.compose(g, acc);
        }
        acc
    }

    pub fn hom(&self, x: Obj, y: Obj) -> &[Mor] {
        &self.hom[x * self.objects.len() + y]
    }

    pub fn out_of(&self, x: Obj) -> &[Mor] {
        &self.out[x]
    }

    pub fn is_iso(&self, f: Mor) -> bool {
        self.inverse[f].is_some()
    }

    pub fn inverse(&self, f: Mor) -> Option<Mor> {
        self.inverse[f]
    }

    pub fn isomorphic(&self, x: Obj, y: Obj) -> bool {
        self.hom(x, y).iter().any(|&f| self.is_iso(f))
    }

    /// True when every hom-set has at most one element.
    pub fn is_thin(&self) -> bool {
        self.hom.iter().all(|h| h.len() <= 1)
    }

    pub fn is_poset(&self) -> bool {
        self.is_thin() && self.morphisms.iter().enumerate().all(|(f, _)| self.is_identity(f) || !self.is_iso(f))
    }

    pub fn is_groupoid(&self) -> bool {
        self.inverse.iter().all(|i| i.is_some())
    }

    /// The unique arrow `x -> y` of a thin category, if any.
    pub fn arrow(&self, x: Obj, y: Obj) -> Option<Mor> {
        let h = self.hom(x, y);
        if h.len() == 1 {
            Some(h[0])
        } else {
            None
        }
    }

    /// Index of the iso class of each object, classes numbered by first
    /// occurrence.
    pub fn iso_classes(&self) -> Vec<usize> {
        let n = self.num_objects();
        let mut class = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if class[x] == usize::MAX {
                for (y, c) in class.iter_mut().enumerate().skip(x) {
                    if *c == usize::MAX && self.isomorphic(x, y) {
                        *c = next;
                    }
                }
                next += 1;
            }
        }
        class
    }

    /// Renames objects and morphisms, keeping all structure.
    pub fn relabel(
        &self,
        obj_name: impl Fn(Obj, &str) -> String,
        mor_name: impl Fn(Mor, &str) -> String,
    ) -> Result<FinCat> {
        let objects = self.objects.iter().enumerate().map(|(i, o)| obj_name(i, o)).collect();
        let morphisms = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, f)| Morphism { name: mor_name(i, &f.name), src: f.src, dst: f.dst })
            .collect();
        FinCat::from_table(objects, morphisms, self.identity.clone(), |g, f| self.try_compose(g, f))
    }

    /// Full subcategory on the given objects (in the given order).
    pub fn full_subcategory(&self, keep: &[Obj]) -> (FinCat, Vec<Mor>) {
        let mut pos = vec![usize::MAX; self.num_objects()];
        for (i, &x) in keep.iter().enumerate() {
            pos[x] = i;
        }
        let mut mors = Vec::new();
        let mut new_index = vec![usize::MAX; self.num_morphisms()];
        for f in self.morphism_ids() {
            if pos[self.src(f)] != usize::MAX && pos[self.dst(f)] != usize::MAX {
                new_index[f] = mors.len();
                mors.push(f);
            }
        }
        let objects = keep.iter().map(|&x| self.objects[x].clone()).collect();
        let morphisms = mors
            .iter()
            .map(|&f| Morphism {
                name: self.morphisms[f].name.clone(),
                src: pos[self.src(f)],
                dst: pos[self.dst(f)],
            })
            .collect();
        let identity = keep.iter().map(|&x| new_index[self.id(x)]).collect();
        let cat = FinCat::from_table(objects, morphisms, identity, |g, f| {
            Some(new_index[self.compose(mors[g], mors[f])])
        })
        .expect("full subcategory of a valid category");
        (cat, mors)
    }
}

/// A functor between finite categories.
#[derive(Clone, PartialEq, Eq)]
pub struct FinFunctor {
    source: Arc<FinCat>,
    target: Arc<FinCat>,
    obj: Vec<Obj>,
    mor: Vec<Mor>,
}

impl fmt::Debug for FinFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinFunctor(obj {:?}, mor {:?})", self.obj, self.mor)
    }
}

impl FinFunctor {
    pub fn new(source: Arc<FinCat>, target: Arc<FinCat>, obj: Vec<Obj>, mor: Vec<Mor>) -> Result<Self> {
        let bad = |s: String| Err(Error::InvalidFunctor(s));
        if obj.len() != source.num_objects() || mor.len() != source.num_morphisms() {
            return bad("maps do not cover the source".into());
        }
        if obj.iter().any(|&y| y >= target.num_objects()) || mor.iter().any(|&g| g >= target.num_morphisms()) {
            return bad("image outside the target".into());
        }
        for f in source.morphism_ids() {
            let g = mor[f];
            if target.src(g) != obj[source.src(f)] || target.dst(g) != obj[source.dst(f)] {
                return bad(format!("{} is not sent between the images of its endpoints", source.morphism_name(f)));
            }
        }
        for x in source.objects() {
            if mor[source.id(x)] != target.id(obj[x]) {
                return bad(format!("identity of {} is not preserved", source.object_name(x)));
            }
        }
        for f in source.morphism_ids() {
            for &g in source.out_of(source.dst(f)) {
                if mor[source.compose(g, f)] != target.compose(mor[g], mor[f]) {
                    return bad(format!(
                        "composite {} ∘ {} is not preserved",
                        source.morphism_name(g),
                        source.morphism_name(f)
                    ));
                }
            }
        }
        Ok(FinFunctor { source, target, obj, mor })
    }

    pub(crate) fn new_unchecked(source: Arc<FinCat>, target: Arc<FinCat>, obj: Vec<Obj>, mor: Vec<Mor>) -> Self {
        debug_assert!(FinFunctor::new(source.clone(), target.clone(), obj.clone(), mor.clone()).is_ok());
        FinFunctor { source, target, obj, mor }
    }

    /// A functor into a thin category is determined by its object map.
    pub fn into_thin(source: Arc<FinCat>, target: Arc<FinCat>, obj: Vec<Obj>) -> Result<Self> {
        let mut mor = Vec::with_capacity(source.num_morphisms());
        for f in source.morphism_ids() {
            let h = target.hom(obj[source.src(f)], obj[source.dst(f)]);
            if h.len() != 1 {
                return Err(Error::InvalidFunctor(format!(
                    "no unique image for {} in the thin target",
                    source.morphism_name(f)
                )));
            }
            mor.push(h[0]);
        }
        FinFunctor::new(source, target, obj, mor)
    }

    pub fn identity(c: &Arc<FinCat>) -> Self {
        FinFunctor {
            source: c.clone(),
            target: c.clone(),
            obj: c.objects().collect(),
            mor: c.morphism_ids().collect(),
        }
    }

    /// Constant functor at an object.
    pub fn constant(source: &Arc<FinCat>, target: &Arc<FinCat>, y: Obj) -> Self {
        FinFunctor {
            source: source.clone(),
            target: target.clone(),
            obj: vec![y; source.num_objects()],
            mor: vec![target.id(y); source.num_morphisms()],
        }
    }

    pub fn source(&self) -> &Arc<FinCat> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCat> {
        &self.target
    }

    pub fn obj(&self, x: Obj) -> Obj {
        self.obj[x]
    }

    pub fn mor(&self, f: Mor) -> Mor {
        self.mor[f]
    }

    pub fn object_map(&self) -> &[Obj] {
        &self.obj
    }

    pub fn morphism_map(&self) -> &[Mor] {
        &self.mor
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinFunctor) -> FinFunctor {
        assert!(*first.target == *self.source, "functors are not composable");
        FinFunctor {
            source: first.source.clone(),
            target: self.target.clone(),
            obj: first.obj.iter().map(|&x| self.obj[x]).collect(),
            mor: first.mor.iter().map(|&f| self.mor[f]).collect(),
        }
    }

    /// The same functor between the opposite categories.
    pub fn opposite(&self) -> FinFunctor {
        FinFunctor {
            source: Arc::new(opposite(&self.source)),
            target: Arc::new(opposite(&self.target)),
            obj: self.obj.clone(),
            mor: self.mor.clone(),
        }
    }

    /// Re-targets along an identical copy of the target category.
    pub fn with_categories(&self, source: Arc<FinCat>, target: Arc<FinCat>) -> FinFunctor {
        assert!(*source == *self.source && *target == *self.target);
        FinFunctor { source, target, obj: self.obj.clone(), mor: self.mor.clone() }
    }

    pub fn is_faithful(&self) -> bool {
        let s = &self.source;
        s.objects().all(|x| {
            s.objects().all(|y| {
                let imgs: Vec<Mor> = s.hom(x, y).iter().map(|&f| self.mor[f]).collect();
                let mut d = imgs.clone();
                d.sort_unstable();
                d.dedup();
                d.len() == imgs.len()
            })
        })
    }

    pub fn is_full(&self) -> bool {
        let s = &self.source;
        s.objects().all(|x| {
            s.objects().all(|y| {
                let h = self.target.hom(self.obj[x], self.obj[y]);
                h.iter().all(|g| s.hom(x, y).iter().any(|&f| self.mor[f] == *g))
            })
        })
    }

    pub fn is_essentially_surjective(&self) -> bool {
        self.target
            .objects()
            .all(|d| self.obj.iter().any(|&y| self.target.isomorphic(y, d)))
    }

    /// Reflects isomorphisms.
    pub fn is_conservative(&self) -> bool {
        self.source
            .morphism_ids()
            .all(|f| !self.target.is_iso(self.mor[f]) || self.source.is_iso(f))
    }

    pub fn is_isomorphism(&self) -> bool {
        let mut o = self.obj.clone();
        o.sort_unstable();
        o.dedup();
        let mut m = self.mor.clone();
        m.sort_unstable();
        m.dedup();
        o.len() == self.target.num_objects()
            && o.len() == self.obj.len()
            && m.len() == self.target.num_morphisms()
            && m.len() == self.mor.len()
    }

    /// Objects of the source lying over `y`.
    pub fn fiber_objects(&self, y: Obj) -> Vec<Obj> {
        self.source.objects().filter(|&x| self.obj[x] == y).collect()
    }

    /// The fiber over `y` as a subcategory of the source (arrows over the
    /// identity of `y`), with the inclusion of morphisms.
    pub fn fiber(&self, y: Obj) -> (FinCat, Vec<Obj>, Vec<Mor>) {
        let objs = self.fiber_objects(y);
        let idy = self.target.id(y);
        let (full, mors) = self.source.full_subcategory(&objs);
        let keep: Vec<Mor> = (0..mors.len()).filter(|&i| self.mor[mors[i]] == idy).collect();
        let sub = WideSubcat::from_members(Arc::new(full), keep.iter().copied());
        let (cat, inner) = sub.as_category();
        let mors = inner.iter().map(|&i| mors[i]).collect();
        (cat, objs, mors)
    }
}

/// A natural transformation between parallel functors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NatTrans {
    source: FinFunctor,
    target: FinFunctor,
    components: Vec<Mor>,
}

impl NatTrans {
    pub fn new(source: FinFunctor, target: FinFunctor, components: Vec<Mor>) -> Result<Self> {
        let bad = |s: String| Err(Error::InvalidTransformation(s));
        if *source.source != *target.source || *source.target != *target.target {
            return bad("functors are not parallel".into());
        }
        let c = &source.source;
        let d = &source.target;
        if components.len() != c.num_objects() {
            return bad("components do not cover the source".into());
        }
        for x in c.objects() {
            let a = components[x];
            if a >= d.num_morphisms() || d.src(a) != source.obj[x] || d.dst(a) != target.obj[x] {
                return bad(format!("component at {} has the wrong endpoints", c.object_name(x)));
            }
        }
        for f in c.morphism_ids() {
            let (x, y) = (c.src(f), c.dst(f));
            if d.compose(target.mor[f], components[x]) != d.compose(components[y], source.mor[f]) {
                return bad(format!("naturality square for {} does not commute", c.morphism_name(f)));
            }
        }
        Ok(NatTrans { source, target, components })
    }

    pub fn identity(f: &FinFunctor) -> NatTrans {
        let d = &f.target;
        NatTrans {
            source: f.clone(),
            target: f.clone(),
            components: f.obj.iter().map(|&y| d.id(y)).collect(),
        }
    }

    pub fn source(&self) -> &FinFunctor {
        &self.source
    }

    pub fn target(&self) -> &FinFunctor {
        &self.target
    }

    pub fn component(&self, x: Obj) -> Mor {
        self.components[x]
    }

    pub fn components(&self) -> &[Mor] {
        &self.components
    }

    /// Vertical composite `self ∘ first`.
    pub fn after(&self, first: &NatTrans) -> NatTrans {
        assert!(first.target == self.source, "transformations are not composable");
        let d = &self.source.target;
        NatTrans {
            source: first.source.clone(),
            target: self.target.clone(),
            components: (0..self.components.len())
                .map(|x| d.compose(self.components[x], first.components[x]))
                .collect(),
        }
    }

    /// Whiskering `self ∘ h` for a functor `h` into the common source.
    pub fn precompose(&self, h: &FinFunctor) -> NatTrans {
        NatTrans {
            source: self.source.after(h),
            target: self.target.after(h),
            components: h.obj.iter().map(|&x| self.components[x]).collect(),
        }
    }

    /// Whiskering `k ∘ self` for a functor `k` out of the common target.
    pub fn postcompose(&self, k: &FinFunctor) -> NatTrans {
        NatTrans {
            source: k.after(&self.source),
            target: k.after(&self.target),
            components: self.components.iter().map(|&a| k.mor[a]).collect(),
        }
    }

    pub fn is_iso(&self) -> bool {
        let d = &self.source.target;
        self.components.iter().all(|&a| d.is_iso(a))
    }

    pub fn is_identity(&self) -> bool {
        let d = &self.source.target;
        self.components.iter().all(|&a| d.is_identity(a))
    }
}

/// A wide subcategory: all objects, a composition-closed set of arrows
/// containing every isomorphism.
#[derive(Clone, PartialEq, Eq)]
pub struct WideSubcat {
    parent: Arc<FinCat>,
    members: Vec<bool>,
}

impl fmt::Debug for WideSubcat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WideSubcat({:?})", self.morphisms())
    }
}

impl WideSubcat {
    pub fn new(parent: Arc<FinCat>, members: impl IntoIterator<Item = Mor>) -> Result<Self> {
        let sub = WideSubcat::from_members(parent, members);
        if let Some(f) = sub.parent.morphism_ids().find(|&f| sub.parent.is_iso(f) && !sub.members[f]) {
            return Err(Error::InvalidSubcategory(format!(
                "isomorphism {} is missing",
                sub.parent.morphism_name(f)
            )));
        }
        if let Some((g, f)) = sub.composition_gap() {
            return Err(Error::InvalidSubcategory(format!(
                "not closed under composition: {} ∘ {}",
                sub.parent.morphism_name(g),
                sub.parent.morphism_name(f)
            )));
        }
        Ok(sub)
    }

    pub(crate) fn from_members(parent: Arc<FinCat>, members: impl IntoIterator<Item = Mor>) -> Self {
        let mut m = vec![false; parent.num_morphisms()];
        for f in members {
            m[f] = true;
        }
        for x in parent.objects() {
            m[parent.id(x)] = true;
        }
        WideSubcat { parent, members: m }
    }

    /// The smallest wide subcategory containing the generators and all
    /// isomorphisms.
    pub fn generated(parent: Arc<FinCat>, generators: impl IntoIterator<Item = Mor>) -> Self {
        let isos: Vec<Mor> = parent.morphism_ids().filter(|&f| parent.is_iso(f)).collect();
        let mut sub = WideSubcat::from_members(parent, generators.into_iter().chain(isos));
        while let Some((g, f)) = sub.composition_gap() {
            let h = sub.parent.compose(g, f);
            sub.members[h] = true;
        }
        sub
    }

    pub fn all(parent: Arc<FinCat>) -> Self {
        let n = parent.num_morphisms();
        WideSubcat { parent, members: vec![true; n] }
    }

    fn composition_gap(&self) -> Option<(Mor, Mor)> {
        let c = &self.parent;
        for f in c.morphism_ids().filter(|&f| self.members[f]) {
            for &g in c.out_of(c.dst(f)) {
                if self.members[g] && !self.members[c.compose(g, f)] {
                    return Some((g, f));
                }
            }
        }
        None
    }

    pub fn parent(&self) -> &Arc<FinCat> {
        &self.parent
    }

    pub fn contains(&self, f: Mor) -> bool {
        self.members[f]
    }

    pub fn morphisms(&self) -> Vec<Mor> {
        (0..self.members.len()).filter(|&f| self.members[f]).collect()
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Membership carried over to an identical copy of the parent.
    pub fn rebase(&self, parent: Arc<FinCat>) -> WideSubcat {
        assert_eq!(parent.num_morphisms(), self.members.len());
        WideSubcat { parent, members: self.members.clone() }
    }

    /// The same arrows viewed in the opposite category.
    pub fn opposite(&self) -> WideSubcat {
        WideSubcat {
            parent: Arc::new(opposite(&self.parent)),
            members: self.members.clone(),
        }
    }

    /// Intersection, which is again a wide subcategory.
    pub fn intersect(&self, other: &WideSubcat) -> WideSubcat {
        WideSubcat {
            parent: self.parent.clone(),
            members: self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect(),
        }
    }

    /// The subcategory as a category in its own right, with the inclusion of
    /// morphism indices.
    pub fn as_category(&self) -> (FinCat, Vec<Mor>) {
        let c = &self.parent;
        let mors = self.morphisms();
        let mut new_index = vec![usize::MAX; c.num_morphisms()];
        for (i, &f) in mors.iter().enumerate() {
            new_index[f] = i;
        }
        let morphisms = mors.iter().map(|&f| c.morphism(f).clone()).collect();
        let identity = c.objects().map(|x| new_index[c.id(x)]).collect();
        let cat = FinCat::from_table(c.object_names().to_vec(), morphisms, identity, |g, f| {
            Some(new_index[c.compose(mors[g], mors[f])])
        })
        .expect("wide subcategory of a valid category");
        (cat, mors)
    }
}

pub fn opposite(c: &FinCat) -> FinCat {
    let morphisms = c
        .morphisms
        .iter()
        .map(|f| Morphism { name: f.name.clone(), src: f.dst, dst: f.src })
        .collect();
    FinCat::from_table(c.objects.clone(), morphisms, c.identity.clone(), |g, f| c.try_compose(f, g))
        .expect("opposite of a valid category")
}

/// A product category together with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub cat: Arc<FinCat>,
    pub first: FinFunctor,
    pub second: FinFunctor,
}

impl Product {
    pub fn pair_obj(&self, a: Obj, b: Obj) -> Obj {
        a * self.second.target.num_objects() + b
    }

    pub fn pair_mor(&self, f: Mor, g: Mor) -> Mor {
        f * self.second.target.num_morphisms() + g
    }
}

pub fn product(c: &Arc<FinCat>, d: &Arc<FinCat>) -> Product {
    let (n2, m2) = (d.num_objects(), d.num_morphisms());
    let mut objects = Vec::new();
    for a in c.objects() {
        for b in d.objects() {
            objects.push(format!("({},{})", c.object_name(a), d.object_name(b)));
        }
    }
    let mut morphisms = Vec::new();
    for f in c.morphism_ids() {
        for g in d.morphism_ids() {
            morphisms.push(Morphism {
                name: format!("({},{})", c.morphism_name(f), d.morphism_name(g)),
                src: c.src(f) * n2 + d.src(g),
                dst: c.dst(f) * n2 + d.dst(g),
            });
        }
    }
    let identity = (0..objects.len()).map(|o| c.id(o / n2) * m2 + d.id(o % n2)).collect();
    let cat = Arc::new(
        FinCat::from_table(objects, morphisms, identity, |g, f| {
            Some(c.try_compose(g / m2, f / m2)? * m2 + d.try_compose(g % m2, f % m2)?)
        })
        .expect("product of valid categories"),
    );
    let first = FinFunctor::new_unchecked(
        cat.clone(),
        c.clone(),
        (0..cat.num_objects()).map(|o| o / n2).collect(),
        (0..cat.num_morphisms()).map(|f| f / m2).collect(),
    );
    let second = FinFunctor::new_unchecked(
        cat.clone(),
        d.clone(),
        (0..cat.num_objects()).map(|o| o % n2).collect(),
        (0..cat.num_morphisms()).map(|f| f % m2).collect(),
    );
    Product { cat, first, second }
}

/// Product of two functors, landing in the product of their targets.
pub fn product_functor(f: &FinFunctor, g: &FinFunctor, source: &Product, target: &Product) -> FinFunctor {
    let s = &source.cat;
    let obj = s
        .objects()
        .map(|o| target.pair_obj(f.obj(source.first.obj(o)), g.obj(source.second.obj(o))))
        .collect();
    let mor = s
        .morphism_ids()
        .map(|m| target.pair_mor(f.mor(source.first.mor(m)), g.mor(source.second.mor(m))))
        .collect();
    FinFunctor::new_unchecked(s.clone(), target.cat.clone(), obj, mor)
}

/// The isomorphisms of `c`.
pub fn core(c: &Arc<FinCat>) -> WideSubcat {
    let isos: Vec<Mor> = c.morphism_ids().filter(|&f| c.is_iso(f)).collect();
    WideSubcat::from_members(c.clone(), isos)
}

/// A cone over a cospan `x -> z <- y`: legs `apex -> x` and `apex -> y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cone {
    pub apex: Obj,
    pub left: Mor,
    pub right: Mor,
}

/// All cones over the cospan `f: x -> z <- y :g`, in canonical order.
pub fn cones(c: &FinCat, f: Mor, g: Mor) -> Vec<Cone> {
    assert_eq!(c.dst(f), c.dst(g), "not a cospan");
    let (x, y) = (c.src(f), c.src(g));
    let mut out = Vec::new();
    for w in c.objects() {
        for &a in c.hom(w, x) {
            let fa = c.compose(f, a);
            for &b in c.hom(w, y) {
                if fa == c.compose(g, b) {
                    out.push(Cone { apex: w, left: a, right: b });
                }
            }
        }
    }
    out
}

/// Whether `cone` is a limit cone among `all` cones over the same cospan.
pub fn is_limit_cone(c: &FinCat, cone: &Cone, all: &[Cone]) -> bool {
    all.iter().all(|other| {
        c.hom(other.apex, cone.apex)
            .iter()
            .filter(|&&u| c.compose(cone.left, u) == other.left && c.compose(cone.right, u) == other.right)
            .count()
            == 1
    })
}

/// The canonical pullback of `f: x -> z <- y :g`: least apex index, ties
/// broken by the leg indices. `None` when no limit exists.
pub fn pullback(c: &FinCat, f: Mor, g: Mor) -> Option<Cone> {
    let all = cones(c, f, g);
    all.iter().find(|cone| is_limit_cone(c, cone, &all)).copied()
}

/// Whether the commutative square `apex -> x -> z`, `apex -> y -> z` is a
/// pullback.
pub fn is_pullback_square(c: &FinCat, f: Mor, g: Mor, cone: &Cone) -> bool {
    if c.compose(f, cone.left) != c.compose(g, cone.right) {
        return false;
    }
    is_limit_cone(c, cone, &cones(c, f, g))
}

/// Options restricting a functor search.
#[derive(Default)]
pub struct SearchSpec<'a> {
    /// Only fully faithful functors.
    pub fully_faithful: bool,
    /// Admissible object images.
    pub obj_filter: Option<&'a dyn Fn(Obj, Obj) -> bool>,
    /// Admissible morphism images.
    pub mor_filter: Option<&'a dyn Fn(Mor, Mor) -> bool>,
}

struct Search<'a> {
    c: &'a FinCat,
    d: &'a FinCat,
    spec: &'a SearchSpec<'a>,
    budget: &'a mut Budget,
    // constraints (g, f, g∘f) checked once the largest index is assigned
    checks: Vec<Vec<(Mor, Mor, Mor)>>,
    forced: Vec<Option<(Mor, Mor)>>,
    // objects y < x linked to x by some arrow
    linked: Vec<Vec<Obj>>,
    obj: Vec<Obj>,
    mor: Vec<Mor>,
}

impl<'a> Search<'a> {
    fn new(c: &'a FinCat, d: &'a FinCat, spec: &'a SearchSpec<'a>, budget: &'a mut Budget) -> Self {
        let m = c.num_morphisms();
        let mut checks = vec![Vec::new(); m];
        let mut forced = vec![None; m];
        for f in c.morphism_ids().filter(|&f| !c.is_identity(f)) {
            for &g in c.out_of(c.dst(f)) {
                if c.is_identity(g) {
                    continue;
                }
                let h = c.compose(g, f);
                let top = f.max(g).max(h);
                checks[top].push((g, f, h));
                if f < h && g < h && !c.is_identity(h) && forced[h].is_none() {
                    forced[h] = Some((g, f));
                }
            }
        }
        let n = c.num_objects();
        let linked = (0..n)
            .map(|x| {
                (0..x)
                    .filter(|&y| spec.fully_faithful || !c.hom(x, y).is_empty() || !c.hom(y, x).is_empty())
                    .collect()
            })
            .collect();
        Search {
            c,
            d,
            spec,
            budget,
            checks,
            forced,
            linked,
            obj: vec![NONE; n],
            mor: vec![NONE; m],
        }
    }

    fn object_ok(&self, x: Obj) -> bool {
        let (c, d) = (self.c, self.d);
        let fx = self.obj[x];
        if self.spec.fully_faithful {
            if c.hom(x, x).len() != d.hom(fx, fx).len() {
                return false;
            }
            return self.linked[x].iter().all(|&y| {
                let fy = self.obj[y];
                c.hom(x, y).len() == d.hom(fx, fy).len() && c.hom(y, x).len() == d.hom(fy, fx).len()
            });
        }
        self.linked[x].iter().all(|&y| {
            let fy = self.obj[y];
            (c.hom(x, y).is_empty() || !d.hom(fx, fy).is_empty())
                && (c.hom(y, x).is_empty() || !d.hom(fy, fx).is_empty())
        })
    }

    fn morphism_ok(&self, h: Mor) -> bool {
        let (c, d) = (self.c, self.d);
        let img = self.mor[h];
        if let Some(filter) = self.spec.mor_filter {
            if !filter(h, img) {
                return false;
            }
        }
        if self.spec.fully_faithful {
            let (x, y) = (c.src(h), c.dst(h));
            if c.hom(x, y).iter().any(|&k| k < h && self.mor[k] == img) {
                return false;
            }
        }
        self.checks[h]
            .iter()
            .all(|&(g, f, gf)| d.compose(self.mor[g], self.mor[f]) == self.mor[gf])
    }

    fn run_objects(&mut self, x: Obj, visit: &mut dyn FnMut(&[Obj], &[Mor]) -> bool) -> Result<bool> {
        if x == self.c.num_objects() {
            return self.run_morphisms(0, visit);
        }
        for y in self.d.objects() {
            self.budget.tick()?;
            if let Some(filter) = self.spec.obj_filter {
                if !filter(x, y) {
                    continue;
                }
            }
            self.obj[x] = y;
            if self.object_ok(x) && !self.run_objects(x + 1, visit)? {
                return Ok(false);
            }
        }
        self.obj[x] = NONE;
        Ok(true)
    }

    fn run_morphisms(&mut self, h: Mor, visit: &mut dyn FnMut(&[Obj], &[Mor]) -> bool) -> Result<bool> {
        let (c, d) = (self.c, self.d);
        if h == c.num_morphisms() {
            return Ok(visit(&self.obj, &self.mor));
        }
        let (fx, fy) = (self.obj[c.src(h)], self.obj[c.dst(h)]);
        let fixed = if c.is_identity(h) {
            Some(d.id(fx))
        } else {
            self.forced[h].map(|(g, f)| d.compose(self.mor[g], self.mor[f]))
        };
        let candidates: Vec<Mor> = match fixed {
            Some(v) => vec![v],
            None => d.hom(fx, fy).to_vec(),
        };
        for img in candidates {
            self.budget.tick()?;
            self.mor[h] = img;
            if self.morphism_ok(h) && !self.run_morphisms(h + 1, visit)? {
                return Ok(false);
            }
        }
        self.mor[h] = NONE;
        Ok(true)
    }
}

/// Visits every functor `c -> d` admitted by `spec`, in canonical
/// (lexicographic object map, then morphism map) order. The visitor returns
/// `false` to stop early.
pub fn search_functors(
    c: &FinCat,
    d: &FinCat,
    spec: &SearchSpec<'_>,
    budget: &mut Budget,
    mut visit: impl FnMut(&[Obj], &[Mor]) -> bool,
) -> Result<()> {
    let mut s = Search::new(c, d, spec, budget);
    s.run_objects(0, &mut visit)?;
    Ok(())
}

/// Every functor `c -> d`, in canonical order.
pub fn enumerate_functors(c: &Arc<FinCat>, d: &Arc<FinCat>) -> Result<Vec<FinFunctor>> {
    enumerate_functors_with_budget(c, d, &mut Budget::global())
}

pub fn enumerate_functors_with_budget(
    c: &Arc<FinCat>,
    d: &Arc<FinCat>,
    budget: &mut Budget,
) -> Result<Vec<FinFunctor>> {
    let mut out = Vec::new();
    search_functors(c, d, &SearchSpec::default(), budget, |o, m| {
        out.push(FinFunctor::new_unchecked(c.clone(), d.clone(), o.to_vec(), m.to_vec()));
        true
    })?;
    Ok(out)
}

/// An adjoint equivalence `forward ⊣ backward` with invertible unit
/// `id => backward ∘ forward` and counit `forward ∘ backward => id`.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub forward: FinFunctor,
    pub backward: FinFunctor,
    pub unit: NatTrans,
    pub counit: NatTrans,
}

impl Equivalence {
    /// Both triangle identities, checked against the composition tables.
    pub fn triangle_identities_hold(&self) -> bool {
        let (c, d) = (self.forward.source(), self.forward.target());
        let first = c.objects().all(|x| {
            let fx = self.forward.obj(x);
            d.compose(self.counit.component(fx), self.forward.mor(self.unit.component(x))) == d.id(fx)
        });
        let second = d.objects().all(|y| {
            let gy = self.backward.obj(y);
            c.compose(self.backward.mor(self.counit.component(y)), self.unit.component(gy)) == c.id(gy)
        });
        first && second
    }
}

fn complete_equivalence(
    c: &Arc<FinCat>,
    d: &Arc<FinCat>,
    forward: FinFunctor,
    over_identity: impl Fn(Mor) -> bool,
) -> Option<Equivalence> {
    // For each target object: the least source object and least iso reaching it.
    let mut back_obj = Vec::with_capacity(d.num_objects());
    let mut eps = Vec::with_capacity(d.num_objects());
    for y in d.objects() {
        let found = c.objects().find_map(|x| {
            d.hom(forward.obj(x), y)
                .iter()
                .copied()
                .find(|&e| d.is_iso(e) && over_identity(e))
                .map(|e| (x, e))
        })?;
        back_obj.push(found.0);
        eps.push(found.1);
    }
    let preimage = |x: Obj, x2: Obj, target: Mor| -> Mor {
        *c.hom(x, x2)
            .iter()
            .find(|&&u| forward.mor(u) == target)
            .expect("fully faithful functor has preimages")
    };
    let back_mor: Vec<Mor> = d
        .morphism_ids()
        .map(|k| {
            let (y, y2) = (d.src(k), d.dst(k));
            let t = d.compose(d.inverse(eps[y2]).unwrap(), d.compose(k, eps[y]));
            preimage(back_obj[y], back_obj[y2], t)
        })
        .collect();
    let backward = FinFunctor::new(d.clone(), c.clone(), back_obj, back_mor).ok()?;
    let unit_components: Vec<Mor> = c
        .objects()
        .map(|x| {
            let fx = forward.obj(x);
            preimage(x, backward.obj(fx), d.inverse(eps[fx]).unwrap())
        })
        .collect();
    let unit = NatTrans::new(FinFunctor::identity(c), backward.after(&forward), unit_components).ok()?;
    let counit = NatTrans::new(forward.after(&backward), FinFunctor::identity(d), eps).ok()?;
    Some(Equivalence { forward, backward, unit, counit })
}

/// First adjoint equivalence `c ≃ d` in canonical enumeration order of the
/// forward functor, or `None`.
pub fn equivalent_categories(c: &Arc<FinCat>, d: &Arc<FinCat>) -> Result<Option<Equivalence>> {
    equivalent_categories_with_budget(c, d, &mut Budget::global())
}

pub fn equivalent_categories_with_budget(
    c: &Arc<FinCat>,
    d: &Arc<FinCat>,
    budget: &mut Budget,
) -> Result<Option<Equivalence>> {
    let classes = |k: &FinCat| k.iso_classes().into_iter().max().map_or(0, |m| m + 1);
    if classes(c) != classes(d) {
        return Ok(None);
    }
    let spec = SearchSpec { fully_faithful: true, ..Default::default() };
    let mut found = None;
    search_functors(c, d, &spec, budget, |o, m| {
        let f = FinFunctor::new_unchecked(c.clone(), d.clone(), o.to_vec(), m.to_vec());
        if !f.is_essentially_surjective() {
            return true;
        }
        found = complete_equivalence(c, d, f, |_| true);
        found.is_none()
    })?;
    Ok(found)
}

/// An equivalence of categories over a common base: both functors commute
/// with the projections, and unit and counit lie over identities.
#[derive(Clone, Debug)]
pub struct OverBaseEquivalence {
    pub equivalence: Equivalence,
}

pub fn equivalent_over_base(p: &FinFunctor, q: &FinFunctor) -> Result<Option<OverBaseEquivalence>> {
    equivalent_over_base_with_budget(p, q, &mut Budget::global())
}

pub fn equivalent_over_base_with_budget(
    p: &FinFunctor,
    q: &FinFunctor,
    budget: &mut Budget,
) -> Result<Option<OverBaseEquivalence>> {
    if **p.target() != **q.target() {
        return Err(Error::BaseMismatch("projections have different targets".into()));
    }
    let (x, y) = (p.source().clone(), q.source().clone());
    // Fiberwise invariant: number of iso classes over each base object.
    for s in p.target().objects() {
        let count = |f: &FinFunctor| {
            let objs = f.fiber_objects(s);
            let src = f.source();
            let mut reps: Vec<Obj> = Vec::new();
            for &o in &objs {
                if !reps.iter().any(|&r| {
                    src.hom(r, o).iter().any(|&e| src.is_iso(e) && f.target().is_identity(f.mor(e)))
                }) {
                    reps.push(o);
                }
            }
            (!objs.is_empty(), reps.len())
        };
        if count(p) != count(q) {
            return Ok(None);
        }
    }
    let obj_filter = |a: Obj, b: Obj| p.obj(a) == q.obj(b);
    let mor_filter = |a: Mor, b: Mor| p.mor(a) == q.mor(b);
    let spec = SearchSpec {
        fully_faithful: true,
        obj_filter: Some(&obj_filter),
        mor_filter: Some(&mor_filter),
    };
    let base = q.target().clone();
    let mut found = None;
    search_functors(&x, &y, &spec, budget, |o, m| {
        let f = FinFunctor::new_unchecked(x.clone(), y.clone(), o.to_vec(), m.to_vec());
        found = complete_equivalence(&x, &y, f, |e| base.is_identity(q.mor(e)));
        found.is_none()
    })?;
    Ok(found.map(|equivalence| OverBaseEquivalence { equivalence }))
}

/// Every natural transformation `f => g`, as component vectors in canonical
/// (lexicographic) order.
pub fn natural_transformations(f: &FinFunctor, g: &FinFunctor) -> Vec<Vec<Mor>> {
    let (c, d) = (f.source(), f.target());
    let n = c.num_objects();
    // morphisms whose later endpoint is x
    let mut due: Vec<Vec<Mor>> = vec![Vec::new(); n];
    for m in c.morphism_ids() {
        if !c.is_identity(m) {
            due[c.src(m).max(c.dst(m))].push(m);
        }
    }
    let mut out = Vec::new();
    let mut comp = vec![NONE; n];
    fn go(
        x: usize,
        f: &FinFunctor,
        g: &FinFunctor,
        due: &[Vec<Mor>],
        comp: &mut Vec<Mor>,
        out: &mut Vec<Vec<Mor>>,
    ) {
        let (c, d) = (f.source(), f.target());
        if x == c.num_objects() {
            out.push(comp.clone());
            return;
        }
        for &a in d.hom(f.obj(x), g.obj(x)) {
            comp[x] = a;
            let ok = due[x].iter().all(|&m| {
                d.compose(g.mor(m), comp[c.src(m)]) == d.compose(comp[c.dst(m)], f.mor(m))
            });
            if ok {
                go(x + 1, f, g, due, comp, out);
            }
        }
        comp[x] = NONE;
    }
    let _ = d;
    go(0, f, g, &due, &mut comp, &mut out);
    out
}

/// The full subcategory of a functor category on a chosen list of functors.
#[derive(Clone, Debug)]
pub struct FunctorCategory {
    pub cat: Arc<FinCat>,
    pub functors: Vec<FinFunctor>,
    /// Components of each morphism.
    pub transformations: Vec<Vec<Mor>>,
}

impl FunctorCategory {
    pub fn new(functors: Vec<FinFunctor>) -> FunctorCategory {
        let mut morphisms = Vec::new();
        let mut transformations = Vec::new();
        let mut index = HashMap::new();
        let mut identity = vec![NONE; functors.len()];
        for (i, f) in functors.iter().enumerate() {
            for (j, g) in functors.iter().enumerate() {
                for comps in natural_transformations(f, g) {
                    let is_id = i == j && comps.iter().all(|&a| f.target().is_identity(a));
                    if is_id {
                        identity[i] = morphisms.len();
                    }
                    index.insert((i, j, comps.clone()), morphisms.len());
                    morphisms.push(Morphism {
                        name: if is_id { format!("id_F{i}") } else { format!("t{}:F{i}=>F{j}", morphisms.len()) },
                        src: i,
                        dst: j,
                    });
                    transformations.push(comps);
                }
            }
        }
        let names = (0..functors.len()).map(|i| format!("F{i}")).collect();
        let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src, m.dst)).collect();
        let cat = {
            let d = functors.first().map(|f| f.target().clone());
            FinCat::from_table(names, morphisms, identity, |v, u| {
                let d = d.as_ref()?;
                let comps: Vec<Mor> = transformations[u]
                    .iter()
                    .zip(&transformations[v])
                    .map(|(&a, &b)| d.compose(b, a))
                    .collect();
                index.get(&(ends[u].0, ends[v].1, comps)).copied()
            })
            .expect("functor category")
        };
        FunctorCategory { cat: Arc::new(cat), functors, transformations }
    }

    pub fn position(&self, f: &FinFunctor) -> Option<Obj> {
        self.functors.iter().position(|g| g.object_map() == f.object_map() && g.morphism_map() == f.morphism_map())
    }

    /// The functor between functor categories induced by precomposition with
    /// `h`, when every restricted functor lies in `target`.
    pub fn restriction(&self, h: &FinFunctor, target: &FunctorCategory) -> Option<FinFunctor> {
        let obj: Option<Vec<Obj>> = self.functors.iter().map(|f| target.position(&f.after(h))).collect();
        let obj = obj?;
        let mut mor = Vec::with_capacity(self.transformations.len());
        for (k, comps) in self.transformations.iter().enumerate() {
            let restricted: Vec<Mor> = h.object_map().iter().map(|&x| comps[x]).collect();
            let (s, t) = (obj[self.cat.src(k)], obj[self.cat.dst(k)]);
            let idx = target
                .cat
                .hom(s, t)
                .iter()
                .copied()
                .find(|&m| target.transformations[m] == restricted)?;
            mor.push(idx);
        }
        FinFunctor::new(self.cat.clone(), target.cat.clone(), obj, mor).ok()
    }
}

/// Whether `f` is an equivalence of categories (fully faithful and
/// essentially surjective).
pub fn is_equivalence(f: &FinFunctor) -> bool {
    f.is_faithful() && f.is_full() && f.is_essentially_surjective()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FinCat> {
        Arc::new(FinCat::preorder((0..=n).map(|i| i.to_string()).collect(), |a, b| a <= b).unwrap())
    }

    #[test]
    fn opposite_is_an_involution() {
        let c = chain(2);
        let op = opposite(&c);
        assert_eq!(op.src(c.arrow(0, 1).unwrap()), 1);
        assert_eq!(opposite(&op), *c);
        let g = FinCat::cyclic_group(3);
        assert_eq!(opposite(&opposite(&g)), g);
    }

    #[test]
    fn functors_out_of_an_idempotent() {
        let m = |name: &str| Morphism { name: name.into(), src: 0, dst: 0 };
        let e = Arc::new(
            FinCat::from_table(vec!["x".into()], vec![m("id_x"), m("e")], vec![0], |g, f| Some(g.max(f))).unwrap(),
        );
        assert_eq!(enumerate_functors(&e, &e).unwrap().len(), 2);
        assert!(equivalent_categories(&e, &e).unwrap().is_some());
    }

    #[test]
    fn product_of_two_arrows_is_a_square() {
        let c = chain(1);
        let p = product(&c, &c);
        assert_eq!(p.cat.num_objects(), 4);
        assert_eq!(p.cat.num_morphisms(), 9);
        let unit = product(&c, &chain(0));
        assert!(unit.first.is_isomorphism());
    }

    #[test]
    fn cores() {
        assert_eq!(core(&chain(2)).len(), 3);
        assert_eq!(core(&Arc::new(FinCat::cyclic_group(2))).len(), 2);
        assert_eq!(core(&Arc::new(FinCat::walking_iso())).len(), 4);
    }

    #[test]
    fn pullback_in_the_square_is_the_meet() {
        let c = chain(1);
        let sq = product(&c, &c);
        let k = &sq.cat;
        let f = k.arrow(sq.pair_obj(0, 1), sq.pair_obj(1, 1)).unwrap();
        let g = k.arrow(sq.pair_obj(1, 0), sq.pair_obj(1, 1)).unwrap();
        assert_eq!(pullback(k, f, g).unwrap().apex, sq.pair_obj(0, 0));
        let z = sq.pair_obj(1, 1);
        let cone = pullback(k, k.id(z), k.id(z)).unwrap();
        assert_eq!((cone.apex, cone.left, cone.right), (z, k.id(z), k.id(z)));
    }

    #[test]
    fn no_pullback_without_cones() {
        let d = FinCat::discrete(vec!["x".into(), "y".into()]);
        // identities are the only arrows; a cospan needs a common target
        assert!(pullback(&d, d.id(0), d.id(0)).is_some());
        let v = FinCat::preorder(vec!["x".into(), "y".into(), "z".into()], |a, b| a == b || b == 2).unwrap();
        assert!(pullback(&v, v.arrow(0, 2).unwrap(), v.arrow(1, 2).unwrap()).is_none());
    }

    #[test]
    fn functor_counts() {
        let d = Arc::new(FinCat::discrete(vec!["x".into(), "y".into()]));
        assert_eq!(enumerate_functors(&chain(0), &chain(3)).unwrap().len(), 4);
        assert_eq!(enumerate_functors(&chain(1), &chain(1)).unwrap().len(), 3);
        assert_eq!(enumerate_functors(&chain(1), &d).unwrap().len(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_functors_with_budget(&chain(4), &chain(4), &mut Budget::new(10)).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded(10));
    }

    #[test]
    fn equivalences() {
        let iso = Arc::new(FinCat::walking_iso());
        let w = equivalent_categories(&iso, &chain(0)).unwrap().unwrap();
        assert!(w.triangle_identities_hold());
        assert!(equivalent_categories(&chain(1), &chain(0)).unwrap().is_none());
        let id = equivalent_categories(&chain(2), &chain(2)).unwrap().unwrap();
        assert_eq!(id.forward, FinFunctor::identity(&chain(2)));
    }

    #[test]
    fn functor_category_of_arrows() {
        let c = chain(1);
        let fs = enumerate_functors(&c, &c).unwrap();
        let fc = FunctorCategory::new(fs);
        // three monotone maps ordered pointwise: a chain of length two
        assert_eq!(fc.cat.num_objects(), 3);
        assert_eq!(fc.cat.num_morphisms(), 6);
        assert!(is_equivalence(&FinFunctor::identity(&fc.cat)));
    }

    #[test]
    fn fibers_of_a_projection() {
        let c = chain(1);
        let p = product(&c, &chain(2));
        let (fib, objs, _) = p.first.fiber(0);
        assert_eq!(objs.len(), 3);
        assert_eq!(fib.num_morphisms(), 6);
    }
}
