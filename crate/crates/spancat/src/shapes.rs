//! Standard indexing categories: simplices, twisted arrow categories and
//! their triple structures, the double twisted poset, arrow categories and
//! the two interpolation shapes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::fincat::{opposite, product, FinCat, FinFunctor, Mor, Morphism, Obj, Product, WideSubcat};

/// A poset (or any category) with named wide subcategories.
#[derive(Clone, Debug)]
pub struct MarkedPoset {
    pub carrier: Arc<FinCat>,
    pub classes: Vec<(String, WideSubcat)>,
}

impl MarkedPoset {
    pub fn class(&self, name: &str) -> &WideSubcat {
        &self
            .classes
            .iter()
            .find(|(n, _)| n == name)
            .unwrap_or_else(|| panic!("no class named {name}"))
            .1
    }
}

/// The linear order `0 < 1 < ... < n`.
pub fn simplex(n: usize) -> FinCat {
    FinCat::preorder((0..=n).map(|i| i.to_string()).collect(), |a, b| a <= b).expect("linear order")
}

/// The twisted arrow category with its projection to `C × C^op`.
///
/// Objects are the arrows of `C`. A morphism `f -> g` is a pair
/// `(a: s(f) -> s(g), b: t(g) -> t(f))` with `f = b ∘ g ∘ a`, so that
/// source and target give a functor into `C × C^op`.
pub struct TwistedArrow {
    pub cat: Arc<FinCat>,
    pub base: Product,
    pub proj: FinFunctor,
    /// For each morphism of the twisted arrow category, its pair `(a, b)`.
    pub components: Vec<(Mor, Mor)>,
}

pub fn twisted_arrow_cat(c: &Arc<FinCat>) -> TwistedArrow {
    let mut morphisms = Vec::new();
    let mut components = Vec::new();
    let mut index = HashMap::new();
    for f in c.morphism_ids() {
        for g in c.morphism_ids() {
            for &a in c.hom(c.src(f), c.src(g)) {
                for &b in c.hom(c.dst(g), c.dst(f)) {
                    if c.compose(b, c.compose(g, a)) == f {
                        index.insert((f, g, a, b), morphisms.len());
                        let name = if f == g && c.is_identity(a) && c.is_identity(b) {
                            format!("id_{}", c.morphism_name(f))
                        } else {
                            format!("<{},{}>:{}=>{}", c.morphism_name(a), c.morphism_name(b), c.morphism_name(f), c.morphism_name(g))
                        };
                        morphisms.push(Morphism { name, src: f, dst: g });
                        components.push((a, b));
                    }
                }
            }
        }
    }
    let objects = c.morphisms().iter().map(|f| f.name.clone()).collect();
    let identity = c
        .morphism_ids()
        .map(|f| index[&(f, f, c.id(c.src(f)), c.id(c.dst(f)))])
        .collect();
    let cat = Arc::new(
        FinCat::from_table(objects, morphisms.clone(), identity, |v, u| {
            let (f, h) = (morphisms[u].src, morphisms[v].dst);
            let (a1, b1) = components[u];
            let (a2, b2) = components[v];
            index.get(&(f, h, c.compose(a2, a1), c.compose(b1, b2))).copied()
        })
        .expect("twisted arrow category"),
    );
    let base = product(c, &Arc::new(opposite(c)));
    let proj = FinFunctor::new(
        cat.clone(),
        base.cat.clone(),
        c.morphism_ids().map(|f| base.pair_obj(c.src(f), c.dst(f))).collect(),
        components.iter().map(|&(a, b)| base.pair_mor(a, b)).collect(),
    )
    .expect("source-target projection");
    TwistedArrow { cat, base, proj, components }
}

/// The twisted arrow category of a category with its canonical triple:
/// ingressive when the target component is invertible, egressive when the
/// source component is.
pub fn twisted_arrow_triple(c: &Arc<FinCat>) -> MarkedPoset {
    let tw = twisted_arrow_cat(c);
    let ing: Vec<Mor> = (0..tw.components.len()).filter(|&m| c.is_iso(tw.components[m].1)).collect();
    let eg: Vec<Mor> = (0..tw.components.len()).filter(|&m| c.is_iso(tw.components[m].0)).collect();
    MarkedPoset {
        classes: vec![
            ("in".into(), WideSubcat::generated(tw.cat.clone(), ing)),
            ("eg".into(), WideSubcat::generated(tw.cat.clone(), eg)),
        ],
        carrier: tw.cat,
    }
}

/// Index of the interval `i <= j` among the objects of `Tw([n])` as built
/// by [`tw_simplex_triple`].
pub fn tw_index(n: usize, i: usize, j: usize) -> Obj {
    assert!(i <= j && j <= n);
    // arrows of the simplex are listed by source, then target
    (0..i).map(|k| n + 1 - k).sum::<usize>() + (j - i)
}

/// `Tw([n])` with objects renamed `(i<=j)` and its triple structure.
pub fn tw_simplex_triple(n: usize) -> MarkedPoset {
    let s = Arc::new(simplex(n));
    let raw = twisted_arrow_triple(&s);
    let names: Vec<String> = s.morphisms().iter().map(|f| format!("({}<={})", f.src, f.dst)).collect();
    let carrier = Arc::new(
        raw.carrier
            .relabel(|x, _| names[x].clone(), |m, _| {
                let f = raw.carrier.morphism(m);
                if f.src == f.dst {
                    format!("id_{}", names[f.src])
                } else {
                    format!("{}->{}", names[f.src], names[f.dst])
                }
            })
            .expect("relabelled twisted arrows"),
    );
    MarkedPoset {
        classes: raw.classes.iter().map(|(k, w)| (k.clone(), w.rebase(carrier.clone()))).collect(),
        carrier,
    }
}

/// Tuples `abcd` with `0 <= a <= b <= c <= d <= n`, in lexicographic order.
pub fn double_twisted_tuples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in a..=n {
            for c in b..=n {
                for d in c..=n {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

fn tuple_name(t: &[usize]) -> String {
    if t.iter().all(|&x| x < 10) {
        t.iter().map(|x| x.to_string()).collect()
    } else {
        t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// The double twisted poset: `abcd <= a'b'c'd'` iff
/// `a <= a' <= b' <= b <= c <= c' <= d' <= d`, with classes `1`..`4`
/// generated by moving only the first, second, third or fourth coordinate.
pub fn double_twisted_poset(n: usize) -> MarkedPoset {
    let tuples = double_twisted_tuples(n);
    let leq = |s: &[usize; 4], t: &[usize; 4]| {
        s[0] <= t[0] && t[0] <= t[1] && t[1] <= s[1] && s[1] <= s[2] && s[2] <= t[2] && t[2] <= t[3] && t[3] <= s[3]
    };
    let carrier = Arc::new(
        FinCat::preorder(tuples.iter().map(|t| tuple_name(t)).collect(), |x, y| leq(&tuples[x], &tuples[y]))
            .expect("double twisted poset"),
    );
    let classes = (0..4)
        .map(|k| {
            let gens: Vec<Mor> = carrier
                .morphism_ids()
                .filter(|&m| {
                    let (s, t) = (&tuples[carrier.src(m)], &tuples[carrier.dst(m)]);
                    (0..4).all(|i| i == k || s[i] == t[i])
                })
                .collect();
            ((k + 1).to_string(), WideSubcat::generated(carrier.clone(), gens))
        })
        .collect();
    MarkedPoset { carrier, classes }
}

/// Pairs `i <= j`, in lexicographic order.
pub fn arrow_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

/// `Ar([n])` as the poset of pairs `i <= j`, with egressives generated by
/// `ij -> ik` and ingressives by `ik -> jk`.
pub fn arrow_simplex_triple(n: usize) -> MarkedPoset {
    let pairs = arrow_pairs(n);
    let carrier = Arc::new(
        FinCat::preorder(
            pairs.iter().map(|&(i, j)| tuple_name(&[i, j])).collect(),
            |x, y| pairs[x].0 <= pairs[y].0 && pairs[x].1 <= pairs[y].1,
        )
        .expect("arrow poset"),
    );
    let moving = |coord: usize| -> Vec<Mor> {
        carrier
            .morphism_ids()
            .filter(|&m| {
                let (s, t) = (pairs[carrier.src(m)], pairs[carrier.dst(m)]);
                if coord == 0 {
                    s.1 == t.1
                } else {
                    s.0 == t.0
                }
            })
            .collect()
    };
    let ing = WideSubcat::generated(carrier.clone(), moving(0));
    let eg = WideSubcat::generated(carrier.clone(), moving(1));
    MarkedPoset { carrier, classes: vec![("in".into(), ing), ("eg".into(), eg)] }
}

/// The map `abcd ↦ ac` from the double twisted poset to `Ar([n])`.
pub fn z_map(n: usize) -> (MarkedPoset, MarkedPoset, FinFunctor) {
    let ttw = double_twisted_poset(n);
    let ar = arrow_simplex_triple(n);
    let tuples = double_twisted_tuples(n);
    let pairs = arrow_pairs(n);
    let obj = tuples
        .iter()
        .map(|t| pairs.iter().position(|&p| p == (t[0], t[2])).unwrap())
        .collect();
    let f = FinFunctor::into_thin(ttw.carrier.clone(), ar.carrier.clone(), obj).expect("z is monotone");
    (ttw, ar, f)
}

/// The arrow category `Fun([1], C)` with its `(target, source)` projection
/// to `C × C`. Morphisms `f -> g` are commutative squares `(a, b)` with
/// `a: s(f) -> s(g)`, `b: t(f) -> t(g)`.
pub struct ArrowCategory {
    pub cat: Arc<FinCat>,
    pub base: Product,
    pub proj: FinFunctor,
    pub components: Vec<(Mor, Mor)>,
}

pub fn arrow_category(c: &Arc<FinCat>) -> ArrowCategory {
    let mut morphisms = Vec::new();
    let mut components = Vec::new();
    let mut index = HashMap::new();
    for f in c.morphism_ids() {
        for g in c.morphism_ids() {
            for &a in c.hom(c.src(f), c.src(g)) {
                for &b in c.hom(c.dst(f), c.dst(g)) {
                    if c.compose(b, f) == c.compose(g, a) {
                        index.insert((f, g, a, b), morphisms.len());
                        let name = if f == g && c.is_identity(a) && c.is_identity(b) {
                            format!("id_{}", c.morphism_name(f))
                        } else {
                            format!("[{},{}]:{}=>{}", c.morphism_name(a), c.morphism_name(b), c.morphism_name(f), c.morphism_name(g))
                        };
                        morphisms.push(Morphism { name, src: f, dst: g });
                        components.push((a, b));
                    }
                }
            }
        }
    }
    let identity = c
        .morphism_ids()
        .map(|f| index[&(f, f, c.id(c.src(f)), c.id(c.dst(f)))])
        .collect();
    let cat = Arc::new(
        FinCat::from_table(c.morphisms().iter().map(|f| f.name.clone()).collect(), morphisms.clone(), identity, |v, u| {
            let (f, h) = (morphisms[u].src, morphisms[v].dst);
            let (a1, b1) = components[u];
            let (a2, b2) = components[v];
            index.get(&(f, h, c.compose(a2, a1), c.compose(b2, b1))).copied()
        })
        .expect("arrow category"),
    );
    let base = product(c, c);
    let proj = FinFunctor::new(
        cat.clone(),
        base.cat.clone(),
        c.morphism_ids().map(|f| base.pair_obj(c.dst(f), c.src(f))).collect(),
        components.iter().map(|&(a, b)| base.pair_mor(b, a)).collect(),
    )
    .expect("target-source projection");
    ArrowCategory { cat, base, proj, components }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Gray,
    Ortho,
}

/// The interpolation shape for Gray fibrations (`0→1→2→4`, `0→3→4`) or
/// for local orthofibrations (`1→0→3`, `1→2→4→3`), as posets on `0..4`.
pub fn interpolation_shape(flavor: Flavor) -> FinCat {
    let edges: &[(usize, usize)] = match flavor {
        Flavor::Gray => &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4), (0, 2), (0, 4)],
        Flavor::Ortho => &[(1, 0), (1, 2), (2, 4), (0, 3), (4, 3), (1, 4), (1, 3)],
    };
    let mut reach = [[false; 5]; 5];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        reach[a][b] = true;
    }
    for k in 0..5 {
        for i in 0..5 {
            for j in 0..5 {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    FinCat::preorder((0..5).map(|i| i.to_string()).collect(), |a, b| reach[a][b]).expect("interpolation shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{equivalent_categories, FinCat};

    #[test]
    fn simplex_counts() {
        for n in 0..6 {
            let s = simplex(n);
            assert_eq!(s.num_objects(), n + 1);
            assert_eq!(s.num_morphisms(), (n + 1) * (n + 2) / 2);
        }
    }

    #[test]
    fn tw_of_two_simplex_matches_the_picture() {
        let tw = tw_simplex_triple(2);
        let c = &tw.carrier;
        assert!(c.is_poset());
        let ob = |i, j| tw_index(2, i, j);
        // covering relations: larger intervals map to the subintervals
        for &(a, b) in &[((0, 2), (0, 1)), ((0, 2), (1, 2)), ((0, 1), (0, 0)), ((0, 1), (1, 1)), ((1, 2), (1, 1)), ((1, 2), (2, 2))] {
            assert!(c.arrow(ob(a.0, a.1), ob(b.0, b.1)).is_some());
        }
        assert!(c.arrow(ob(0, 1), ob(0, 2)).is_none());
        assert!(c.arrow(ob(0, 0), ob(1, 1)).is_none());
        let e = c.arrow(ob(0, 2), ob(0, 1)).unwrap();
        let i = c.arrow(ob(0, 2), ob(1, 2)).unwrap();
        assert!(tw.class("eg").contains(e) && !tw.class("in").contains(e));
        assert!(tw.class("in").contains(i) && !tw.class("eg").contains(i));
    }

    #[test]
    fn tw_of_zero_simplex_is_terminal() {
        let tw = tw_simplex_triple(0);
        assert_eq!((tw.carrier.num_objects(), tw.carrier.num_morphisms()), (1, 1));
    }

    #[test]
    fn double_twisted_small_cases() {
        let t = double_twisted_poset(1);
        let names: Vec<&str> = t.carrier.object_names().iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["0000", "0001", "0011", "0111", "1111"]);
        let e = t.carrier.arrow(1, 0).unwrap();
        assert!(t.class("4").contains(e));
        assert!((1..=3).all(|k| !t.class(&k.to_string()).contains(e)));
        let t0 = double_twisted_poset(0);
        assert_eq!(t0.carrier.num_morphisms(), 1);
    }

    #[test]
    fn double_twisted_is_iterated_twisted_arrows() {
        for n in 0..3 {
            let direct = Arc::new(double_twisted_poset(n).carrier.as_ref().clone());
            let iterated = twisted_arrow_cat(&tw_simplex_triple(n).carrier).cat;
            assert!(equivalent_categories(&direct, &iterated).unwrap().is_some());
            assert_eq!(direct.num_morphisms(), iterated.num_morphisms());
        }
    }

    #[test]
    fn arrow_simplex_classes() {
        let ar = arrow_simplex_triple(1);
        let c = &ar.carrier;
        let (o00, o01, o11) = (0, 1, 2);
        assert!(ar.class("in").contains(c.arrow(o01, o11).unwrap()));
        assert!(ar.class("eg").contains(c.arrow(o00, o01).unwrap()));
        assert!(!ar.class("eg").contains(c.arrow(o00, o11).unwrap()));
        assert_eq!(arrow_simplex_triple(2).carrier.num_objects(), 6);
    }

    #[test]
    fn arrow_category_of_an_arrow() {
        let ar = arrow_category(&Arc::new(simplex(1)));
        assert_eq!(ar.cat.num_objects(), 3);
        let hits = ar.cat.objects().filter(|&o| ar.proj.obj(o) == ar.base.pair_obj(1, 0)).count();
        assert_eq!(hits, 1);
        let ar0 = arrow_category(&Arc::new(simplex(0)));
        assert_eq!(ar0.cat.num_morphisms(), 1);
    }

    #[test]
    fn interpolation_shapes_have_one_source() {
        for flavor in [Flavor::Gray, Flavor::Ortho] {
            let q = interpolation_shape(flavor);
            let sources: Vec<Obj> = q
                .objects()
                .filter(|&x| q.objects().all(|y| y == x || q.hom(y, x).is_empty()))
                .collect();
            assert_eq!(sources.len(), 1);
        }
        let q = interpolation_shape(Flavor::Gray);
        for &(a, b) in &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4), (0, 2), (0, 4)] {
            assert!(q.arrow(a, b).is_some());
        }
        let q = interpolation_shape(Flavor::Ortho);
        for &(a, b) in &[(1, 0), (1, 2), (2, 4), (0, 3), (4, 3), (1, 4), (1, 3)] {
            assert!(q.arrow(a, b).is_some());
        }
    }

    #[test]
    fn tw_of_opposite_is_equivalent() {
        let c = Arc::new(FinCat::preorder(vec!["a".into(), "b".into(), "c".into()], |x, y| x == y || (x == 0)).unwrap());
        let t1 = twisted_arrow_cat(&c).cat;
        let t2 = twisted_arrow_cat(&Arc::new(opposite(&c))).cat;
        assert!(equivalent_categories(&t1, &t2).unwrap().is_some());
    }
}
