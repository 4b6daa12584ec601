//! The line-oriented document format.
//!
//! A document is a sequence of named blocks, each opened by a header line
//! and closed by `END`. Inside a block, a line holding only a section
//! keyword switches section; every other line is an entry of the current
//! section. `#` starts a comment. Identities are implicit and named
//! `id_<object>`.
//!
//! ```text
//! CATEGORY name                      OBJECTS (names), MORPHISMS (f x y), COMPOSE (g f gf)
//! FUNCTOR name source target         OBJECTS (x y), MORPHISMS (f g)
//! TRIPLE name category               INGRESSIVE (names), EGRESSIVE (names)
//! FIBRATION name total first second  OBJECTS (x a b), MORPHISMS (f fa fb)
//! DIAGRAM name index                 VALUES (a C), ACTIONS (f F), COMPOSITORS (g f x m)
//! ADJUNCTION name left right         UNIT (x m), COUNIT (y m)
//! TRANSFORMATION name source target  COMPONENTS (a F), CELLS (f x m)
//! MONOIDAL name category unit        OBJECTS (a b c), MORPHISMS (f g h)
//! LAXMONOIDAL name source target g   MU (x y m), MU0 (m)
//! ```
//!
//! Entries that a thin hom-set determines may be left out.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fibrations::FibredFunctor;
use crate::fincat::{product, FinCat, FinFunctor, Mor, Morphism, Obj, WideSubcat};
use crate::grothendieck::CatDiagram;
use crate::mates::{Adjunction, LaxTransformation};
use crate::monoidal::{LaxMonFunctor, StrictMonCat};
use crate::triplespan::AdequateTriple;

const KEYWORDS: &[&str] = &[
    "CATEGORY",
    "FUNCTOR",
    "TRIPLE",
    "FIBRATION",
    "DIAGRAM",
    "ADJUNCTION",
    "TRANSFORMATION",
    "MONOIDAL",
    "LAXMONOIDAL",
    "END",
    "OBJECTS",
    "MORPHISMS",
    "COMPOSE",
    "INGRESSIVE",
    "EGRESSIVE",
    "VALUES",
    "ACTIONS",
    "COMPOSITORS",
    "UNIT",
    "COUNIT",
    "COMPONENTS",
    "CELLS",
    "MU",
    "MU0",
];

// documents hold a handful of items, so boxing buys nothing
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum Item {
    Category(Arc<FinCat>),
    Functor(FinFunctor),
    Triple(AdequateTriple),
    Fibration(FibredFunctor),
    Diagram(CatDiagram),
    Adjunction(Adjunction),
    Transformation(LaxTransformation),
    Monoidal(StrictMonCat),
    LaxMonoidal(LaxMonFunctor),
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Category(_) => "category",
            Item::Functor(_) => "functor",
            Item::Triple(_) => "triple",
            Item::Fibration(_) => "fibration",
            Item::Diagram(_) => "diagram",
            Item::Adjunction(_) => "adjunction",
            Item::Transformation(_) => "transformation",
            Item::Monoidal(_) => "monoidal",
            Item::LaxMonoidal(_) => "laxmonoidal",
        }
    }
}

/// Named items in dependency order. Items are only added together with
/// everything they refer to.
#[derive(Clone, Debug, Default)]
pub struct Document {
    items: Vec<(String, Item)>,
}

impl Document {
    pub fn new() -> Self {
        Document::default()
    }

    pub fn items(&self) -> &[(String, Item)] {
        &self.items
    }

    /// The last block, which commands act on.
    pub fn subject(&self) -> Option<&(String, Item)> {
        self.items.last()
    }

    pub fn kind(&self) -> Option<&'static str> {
        self.subject().map(|(_, i)| i.kind())
    }

    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }

    pub fn category_name(&self, c: &FinCat) -> Option<&str> {
        self.items.iter().find_map(|(n, i)| match i {
            Item::Category(d) if **d == *c => Some(n.as_str()),
            _ => None,
        })
    }

    fn functor_name(&self, f: &FinFunctor) -> Option<&str> {
        self.items.iter().find_map(|(n, i)| match i {
            Item::Functor(g) if g == f => Some(n.as_str()),
            _ => None,
        })
    }

    fn diagram_name(&self, d: &CatDiagram) -> Option<&str> {
        self.items.iter().find_map(|(n, i)| match i {
            Item::Diagram(e) if same_diagram(d, e) => Some(n.as_str()),
            _ => None,
        })
    }

    fn monoidal_name(&self, m: &StrictMonCat) -> Option<&str> {
        self.items.iter().find_map(|(n, i)| match i {
            Item::Monoidal(k) if *k.carrier == *m.carrier && k.tensor == m.tensor && k.unit == m.unit => Some(n.as_str()),
            _ => None,
        })
    }

    fn fresh(&self, hint: &str) -> String {
        let base = sanitize(hint);
        let mut name = base.clone();
        let mut k = 1;
        while self.get(&name).is_some() {
            k += 1;
            name = format!("{base}{k}");
        }
        name
    }

    fn push(&mut self, hint: &str, item: Item) -> String {
        let name = self.fresh(hint);
        self.items.push((name.clone(), item));
        name
    }

    /// Adds `c` unless an equal category is present; returns its name.
    pub fn push_category(&mut self, hint: &str, c: &Arc<FinCat>) -> String {
        if let Some(n) = self.category_name(c) {
            return n.to_string();
        }
        self.push(hint, Item::Category(c.clone()))
    }

    pub fn push_functor(&mut self, hint: &str, f: &FinFunctor) -> String {
        if let Some(n) = self.functor_name(f) {
            return n.to_string();
        }
        self.push_category(&format!("{hint}_source"), f.source());
        self.push_category(&format!("{hint}_target"), f.target());
        self.push(hint, Item::Functor(f.clone()))
    }

    pub fn push_triple(&mut self, hint: &str, t: &AdequateTriple) -> String {
        self.push_category(&format!("{hint}_carrier"), &t.carrier);
        self.push(hint, Item::Triple(t.clone()))
    }

    pub fn push_fibration(&mut self, hint: &str, p: &FibredFunctor) -> String {
        self.push_category(&format!("{hint}_total"), p.total());
        self.push_category(&format!("{hint}_first"), p.base_a());
        self.push_category(&format!("{hint}_second"), p.base_b());
        self.push(hint, Item::Fibration(p.clone()))
    }

    pub fn push_diagram(&mut self, hint: &str, d: &CatDiagram) -> String {
        if let Some(n) = self.diagram_name(d) {
            return n.to_string();
        }
        self.push_category(&format!("{hint}_index"), &d.index);
        for a in d.index.objects() {
            self.push_category(&format!("{hint}_{}", d.index.object_name(a)), d.value(a));
        }
        for f in d.index.morphism_ids().filter(|&f| !d.index.is_identity(f)) {
            self.push_functor(&format!("{hint}_{}", d.index.morphism_name(f)), d.functor(f));
        }
        self.push(hint, Item::Diagram(d.clone()))
    }

    pub fn push_adjunction(&mut self, hint: &str, a: &Adjunction) -> String {
        self.push_functor(&format!("{hint}_left"), &a.left);
        self.push_functor(&format!("{hint}_right"), &a.right);
        self.push(hint, Item::Adjunction(a.clone()))
    }

    pub fn push_transformation(&mut self, hint: &str, t: &LaxTransformation) -> String {
        self.push_diagram(&format!("{hint}_source"), &t.source);
        self.push_diagram(&format!("{hint}_target"), &t.target);
        for (a, g) in t.components.iter().enumerate() {
            self.push_functor(&format!("{hint}_{}", t.base.object_name(a)), g);
        }
        self.push(hint, Item::Transformation(t.clone()))
    }

    pub fn push_monoidal(&mut self, hint: &str, m: &StrictMonCat) -> String {
        if let Some(n) = self.monoidal_name(m) {
            return n.to_string();
        }
        self.push_category(&format!("{hint}_carrier"), &m.carrier);
        self.push(hint, Item::Monoidal(m.clone()))
    }

    pub fn push_lax_monoidal(&mut self, hint: &str, g: &LaxMonFunctor) -> String {
        self.push_monoidal(&format!("{hint}_source"), &g.source);
        self.push_monoidal(&format!("{hint}_target"), &g.target);
        self.push_functor(&format!("{hint}_functor"), &g.underlying);
        self.push(hint, Item::LaxMonoidal(g.clone()))
    }
}

fn same_diagram(d: &CatDiagram, e: &CatDiagram) -> bool {
    let i = &d.index;
    *d.index == *e.index
        && d.values.iter().zip(&e.values).all(|(a, b)| **a == **b)
        && d.functors == e.functors
        && i.morphism_ids().all(|g| {
            i.morphism_ids().filter(|&f| i.try_compose(g, f).is_some()).all(|f| {
                d.value(i.src(f)).objects().all(|x| d.compositor(g, f, x) == e.compositor(g, f, x))
            })
        })
}

/// Replaces characters the grammar reserves, and avoids keywords.
pub fn sanitize(name: &str) -> String {
    let mut s: String = name.chars().map(|c| if c.is_whitespace() || c == '#' { '_' } else { c }).collect();
    if s.is_empty() {
        s.push('_');
    }
    if KEYWORDS.contains(&s.as_str()) {
        s.push('_');
    }
    s
}

/// Printable, distinct names for the objects and morphisms of a category.
struct Names {
    objects: Vec<String>,
    morphisms: Vec<String>,
}

impl Names {
    fn of(c: &FinCat) -> Names {
        let mut used = HashSet::new();
        let unique = |s: String, used: &mut HashSet<String>| {
            let mut s = s;
            while used.contains(&s) {
                s.push('\'');
            }
            used.insert(s.clone());
            s
        };
        let objects: Vec<String> = c.objects().map(|x| unique(sanitize(c.object_name(x)), &mut used)).collect();
        let mut used_m = HashSet::new();
        let mut morphisms = vec![String::new(); c.num_morphisms()];
        for x in c.objects() {
            morphisms[c.id(x)] = unique(format!("id_{}", objects[x]), &mut used_m);
        }
        for f in c.morphism_ids().filter(|&f| !c.is_identity(f)) {
            morphisms[f] = unique(sanitize(c.morphism_name(f)), &mut used_m);
        }
        Names { objects, morphisms }
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Clone, Debug)]
struct Token {
    text: String,
    line: usize,
    column: usize,
}

fn parse_error(t: &Token, message: impl Into<String>) -> Error {
    Error::Parse { line: t.line, column: t.column, message: message.into() }
}

fn tokenize(text: &str) -> Vec<Vec<Token>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start: Option<usize> = None;
        let chars: Vec<char> = body.chars().collect();
        for (k, &ch) in chars.iter().chain([' '].iter()).enumerate() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(k),
                (true, Some(s)) => {
                    tokens.push(Token { text: chars[s..k].iter().collect(), line: i + 1, column: s + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

/// A block: its header tokens and its entries by section.
struct Block {
    header: Vec<Token>,
    sections: HashMap<&'static str, Vec<Vec<Token>>>,
}

impl Block {
    fn entries(&self, section: &str) -> &[Vec<Token>] {
        self.sections.get(section).map_or(&[], |v| v.as_slice())
    }
}

fn block_shape(kind: &str) -> Option<(usize, &'static [&'static str])> {
    Some(match kind {
        "CATEGORY" => (1, &["OBJECTS", "MORPHISMS", "COMPOSE"]),
        "FUNCTOR" => (3, &["OBJECTS", "MORPHISMS"]),
        "TRIPLE" => (2, &["INGRESSIVE", "EGRESSIVE"]),
        "FIBRATION" => (4, &["OBJECTS", "MORPHISMS"]),
        "DIAGRAM" => (2, &["VALUES", "ACTIONS", "COMPOSITORS"]),
        "ADJUNCTION" => (3, &["UNIT", "COUNIT"]),
        "TRANSFORMATION" => (3, &["COMPONENTS", "CELLS"]),
        "MONOIDAL" => (3, &["OBJECTS", "MORPHISMS"]),
        "LAXMONOIDAL" => (4, &["MU", "MU0"]),
        _ => return None,
    })
}

/// Entry arity per section; `None` for free-form name lists.
fn arity(kind: &str, section: &str) -> Option<usize> {
    match (kind, section) {
        ("CATEGORY", "OBJECTS") | ("TRIPLE", _) => None,
        ("CATEGORY", _) | ("FIBRATION", _) | ("MONOIDAL", _) | ("TRANSFORMATION", "CELLS") | ("LAXMONOIDAL", "MU") => {
            Some(3)
        }
        ("DIAGRAM", "COMPOSITORS") => Some(4),
        ("LAXMONOIDAL", "MU0") => Some(1),
        _ => Some(2),
    }
}

fn split_blocks(text: &str) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    let mut lines = tokenize(text).into_iter();
    while let Some(header) = lines.next() {
        let kind = header[0].text.as_str();
        let (params, sections) =
            block_shape(kind).ok_or_else(|| parse_error(&header[0], format!("expected a block header, found {kind}")))?;
        if header.len() != params + 1 {
            return Err(parse_error(
                &header[0],
                format!("{kind} takes {params} parameter{}", if params == 1 { "" } else { "s" }),
            ));
        }
        for t in &header[1..] {
            if KEYWORDS.contains(&t.text.as_str()) {
                return Err(parse_error(t, format!("{} is a keyword", t.text)));
            }
        }
        let mut block = Block { header: header.clone(), sections: HashMap::new() };
        let mut current: Option<&'static str> = None;
        let mut closed = false;
        for line in lines.by_ref() {
            let first = &line[0];
            if first.text == "END" {
                if line.len() > 1 {
                    return Err(parse_error(&line[1], "unexpected token after END"));
                }
                closed = true;
                break;
            }
            if let Some(&s) = sections.iter().find(|&&s| s == first.text) {
                if line.len() > 1 {
                    return Err(parse_error(&line[1], format!("section header {s} stands alone")));
                }
                if block.sections.contains_key(s) {
                    return Err(parse_error(first, format!("section {s} appears twice")));
                }
                block.sections.insert(s, Vec::new());
                current = Some(s);
                continue;
            }
            let Some(s) = current else {
                return Err(parse_error(first, format!("expected a section of {kind}, found {}", first.text)));
            };
            if let Some(t) = line.iter().find(|t| KEYWORDS.contains(&t.text.as_str())) {
                return Err(parse_error(t, format!("{} is not valid here", t.text)));
            }
            if let Some(n) = arity(kind, s) {
                if line.len() != n {
                    return Err(parse_error(first, format!("entries of {s} have {n} field{}", if n == 1 { "" } else { "s" })));
                }
            }
            block.sections.get_mut(s).expect("section opened").push(line);
        }
        if !closed {
            return Err(parse_error(&header[0], format!("{kind} block is not closed by END")));
        }
        blocks.push(block);
    }
    Ok(blocks)
}

/// Prefixes a construction failure with the block it happened in.
fn in_block(b: &Block, e: Error) -> Error {
    let at = format!("{} {} (line {}): ", b.header[0].text, b.header[1].text, b.header[0].line);
    match e {
        Error::InvalidCategory(s) => Error::InvalidCategory(at + &s),
        Error::InvalidFunctor(s) => Error::InvalidFunctor(at + &s),
        Error::InvalidTransformation(s) => Error::InvalidTransformation(at + &s),
        Error::InvalidSubcategory(s) => Error::InvalidSubcategory(at + &s),
        Error::InvalidTriple(s) => Error::InvalidTriple(at + &s),
        Error::BaseMismatch(s) => Error::BaseMismatch(at + &s),
        Error::ShapeMismatch(s) => Error::ShapeMismatch(at + &s),
        Error::IncoherentLaxStructure(s) => Error::IncoherentLaxStructure(at + &s),
        Error::IncoherentDiagram(s) => Error::IncoherentDiagram(at + &s),
        Error::InvalidDiagram(s) => Error::InvalidDiagram(at + &s),
        other => other,
    }
}

fn obj_of(c: &FinCat, t: &Token) -> Result<Obj> {
    c.object_index(&t.text).ok_or_else(|| parse_error(t, format!("unknown object {}", t.text)))
}

fn mor_of(c: &FinCat, t: &Token) -> Result<Mor> {
    c.morphism_index(&t.text).ok_or_else(|| parse_error(t, format!("unknown morphism {}", t.text)))
}

/// The single morphism `x -> y`, if the hom-set has exactly one.
fn unique_arrow(c: &FinCat, x: Obj, y: Obj) -> Option<Mor> {
    match c.hom(x, y) {
        [m] => Some(*m),
        _ => None,
    }
}

fn expect_arrow(c: &FinCat, m: Mor, x: Obj, y: Obj, t: &Token) -> Result<Mor> {
    if c.src(m) != x || c.dst(m) != y {
        return Err(parse_error(
            t,
            format!("{} does not run from {} to {}", t.text, c.object_name(x), c.object_name(y)),
        ));
    }
    Ok(m)
}

struct Parser {
    doc: Document,
}

impl Parser {
    fn category(&self, t: &Token) -> Result<Arc<FinCat>> {
        match self.doc.get(&t.text) {
            Some(Item::Category(c)) => Ok(c.clone()),
            _ => Err(parse_error(t, format!("{} is not a category", t.text))),
        }
    }

    fn functor(&self, t: &Token) -> Result<FinFunctor> {
        match self.doc.get(&t.text) {
            Some(Item::Functor(f)) => Ok(f.clone()),
            _ => Err(parse_error(t, format!("{} is not a functor", t.text))),
        }
    }

    fn diagram(&self, t: &Token) -> Result<CatDiagram> {
        match self.doc.get(&t.text) {
            Some(Item::Diagram(d)) => Ok(d.clone()),
            _ => Err(parse_error(t, format!("{} is not a diagram", t.text))),
        }
    }

    fn monoidal(&self, t: &Token) -> Result<StrictMonCat> {
        match self.doc.get(&t.text) {
            Some(Item::Monoidal(m)) => Ok(m.clone()),
            _ => Err(parse_error(t, format!("{} is not a monoidal category", t.text))),
        }
    }

    fn block(&mut self, b: &Block) -> Result<()> {
        let name = &b.header[1];
        if self.doc.get(&name.text).is_some() {
            return Err(parse_error(name, format!("{} is already defined", name.text)));
        }
        let item = match b.header[0].text.as_str() {
            "CATEGORY" => Item::Category(Arc::new(self.parse_category(b)?)),
            "FUNCTOR" => Item::Functor(self.parse_functor(b)?),
            "TRIPLE" => Item::Triple(self.parse_triple(b)?),
            "FIBRATION" => Item::Fibration(self.parse_fibration(b)?),
            "DIAGRAM" => Item::Diagram(self.parse_diagram(b)?),
            "ADJUNCTION" => Item::Adjunction(self.parse_adjunction(b)?),
            "TRANSFORMATION" => Item::Transformation(self.parse_transformation(b)?),
            "MONOIDAL" => Item::Monoidal(self.parse_monoidal(b)?),
            _ => Item::LaxMonoidal(self.parse_lax_monoidal(b)?),
        };
        self.doc.items.push((name.text.clone(), item));
        Ok(())
    }

    fn parse_category(&self, b: &Block) -> Result<FinCat> {
        let mut objects: Vec<String> = Vec::new();
        let mut obj_index = HashMap::new();
        for t in b.entries("OBJECTS").iter().flatten() {
            if obj_index.insert(t.text.clone(), objects.len()).is_some() {
                return Err(parse_error(t, format!("object {} declared twice", t.text)));
            }
            objects.push(t.text.clone());
        }
        let mut morphisms: Vec<Morphism> =
            objects.iter().enumerate().map(|(x, o)| Morphism { name: format!("id_{o}"), src: x, dst: x }).collect();
        let identity: Vec<Mor> = (0..objects.len()).collect();
        let mut mor_index: HashMap<String, Mor> = morphisms.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let find_obj = |t: &Token| obj_index.get(&t.text).copied().ok_or_else(|| parse_error(t, format!("unknown object {}", t.text)));
        for e in b.entries("MORPHISMS") {
            let (src, dst) = (find_obj(&e[1])?, find_obj(&e[2])?);
            if mor_index.insert(e[0].text.clone(), morphisms.len()).is_some() {
                return Err(parse_error(&e[0], format!("morphism {} declared twice", e[0].text)));
            }
            morphisms.push(Morphism { name: e[0].text.clone(), src, dst });
        }
        let find_mor = |t: &Token| mor_index.get(&t.text).copied().ok_or_else(|| parse_error(t, format!("unknown morphism {}", t.text)));
        let mut table = HashMap::new();
        for e in b.entries("COMPOSE") {
            let (g, f, gf) = (find_mor(&e[0])?, find_mor(&e[1])?, find_mor(&e[2])?);
            if morphisms[f].dst != morphisms[g].src {
                return Err(parse_error(&e[0], format!("{} and {} are not composable", e[0].text, e[1].text)));
            }
            if morphisms[gf].src != morphisms[f].src || morphisms[gf].dst != morphisms[g].dst {
                return Err(parse_error(&e[2], format!("{} has the wrong endpoints for {} ∘ {}", e[2].text, e[0].text, e[1].text)));
            }
            if table.insert((g, f), gf).is_some() {
                return Err(parse_error(&e[0], format!("composite {} ∘ {} given twice", e[0].text, e[1].text)));
            }
        }
        let n = objects.len();
        let mut hom = vec![Vec::new(); n * n];
        for (i, m) in morphisms.iter().enumerate() {
            hom[m.src * n + m.dst].push(i);
        }
        let compose = |g: Mor, f: Mor| -> Option<Mor> {
            if g < n {
                return Some(f);
            }
            if f < n {
                return Some(g);
            }
            table.get(&(g, f)).copied().or_else(|| match hom[morphisms[f].src * n + morphisms[g].dst].as_slice() {
                [m] => Some(*m),
                _ => None,
            })
        };
        for f in n..morphisms.len() {
            for g in n..morphisms.len() {
                if morphisms[f].dst == morphisms[g].src && compose(g, f).is_none() {
                    return Err(parse_error(
                        &b.header[0],
                        format!("composite {} ∘ {} is not determined", morphisms[g].name, morphisms[f].name),
                    ));
                }
            }
        }
        FinCat::from_table(objects, morphisms.clone(), identity, compose).map_err(|e| in_block(b, e))
    }

    fn parse_functor(&self, b: &Block) -> Result<FinFunctor> {
        let (c, d) = (self.category(&b.header[2])?, self.category(&b.header[3])?);
        let mut obj = vec![None; c.num_objects()];
        for e in b.entries("OBJECTS") {
            let x = obj_of(&c, &e[0])?;
            if obj[x].replace(obj_of(&d, &e[1])?).is_some() {
                return Err(parse_error(&e[0], format!("{} mapped twice", e[0].text)));
            }
        }
        let obj = c
            .objects()
            .map(|x| obj[x].ok_or_else(|| parse_error(&b.header[0], format!("no image for object {}", c.object_name(x)))))
            .collect::<Result<Vec<_>>>()?;
        let mut mor = vec![None; c.num_morphisms()];
        for x in c.objects() {
            mor[c.id(x)] = Some(d.id(obj[x]));
        }
        for e in b.entries("MORPHISMS") {
            let f = mor_of(&c, &e[0])?;
            let g = expect_arrow(&d, mor_of(&d, &e[1])?, obj[c.src(f)], obj[c.dst(f)], &e[1])?;
            if !c.is_identity(f) && mor[f].replace(g).is_some() {
                return Err(parse_error(&e[0], format!("{} mapped twice", e[0].text)));
            }
            mor[f] = Some(g);
        }
        let mor = c
            .morphism_ids()
            .map(|f| {
                mor[f].or_else(|| unique_arrow(&d, obj[c.src(f)], obj[c.dst(f)])).ok_or_else(|| {
                    parse_error(&b.header[0], format!("no image for morphism {}", c.morphism_name(f)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FinFunctor::new(c, d, obj, mor).map_err(|e| in_block(b, e))
    }

    fn parse_triple(&self, b: &Block) -> Result<AdequateTriple> {
        let c = self.category(&b.header[2])?;
        let class = |section: &str| -> Result<Vec<Mor>> {
            b.entries(section).iter().flatten().map(|t| mor_of(&c, t)).collect()
        };
        let ing = WideSubcat::new(c.clone(), class("INGRESSIVE")?).map_err(|e| in_block(b, e))?;
        let eg = WideSubcat::new(c.clone(), class("EGRESSIVE")?).map_err(|e| in_block(b, e))?;
        AdequateTriple::new(c, ing, eg).map_err(|e| in_block(b, e))
    }

    fn parse_fibration(&self, b: &Block) -> Result<FibredFunctor> {
        let x = self.category(&b.header[2])?;
        let base = product(&self.category(&b.header[3])?, &self.category(&b.header[4])?);
        let (a, bb) = (base.first.target().clone(), base.second.target().clone());
        let mut obj = vec![None; x.num_objects()];
        for e in b.entries("OBJECTS") {
            let o = obj_of(&x, &e[0])?;
            if obj[o].replace((obj_of(&a, &e[1])?, obj_of(&bb, &e[2])?)).is_some() {
                return Err(parse_error(&e[0], format!("{} mapped twice", e[0].text)));
            }
        }
        let obj = x
            .objects()
            .map(|o| obj[o].ok_or_else(|| parse_error(&b.header[0], format!("no image for object {}", x.object_name(o)))))
            .collect::<Result<Vec<_>>>()?;
        let mut mor = vec![None; x.num_morphisms()];
        for o in x.objects() {
            mor[x.id(o)] = Some((a.id(obj[o].0), bb.id(obj[o].1)));
        }
        for e in b.entries("MORPHISMS") {
            let f = mor_of(&x, &e[0])?;
            let (s, t) = (obj[x.src(f)], obj[x.dst(f)]);
            let fa = expect_arrow(&a, mor_of(&a, &e[1])?, s.0, t.0, &e[1])?;
            let fb = expect_arrow(&bb, mor_of(&bb, &e[2])?, s.1, t.1, &e[2])?;
            if !x.is_identity(f) && mor[f].replace((fa, fb)).is_some() {
                return Err(parse_error(&e[0], format!("{} mapped twice", e[0].text)));
            }
            mor[f] = Some((fa, fb));
        }
        let mor = x
            .morphism_ids()
            .map(|f| {
                let (s, t) = (obj[x.src(f)], obj[x.dst(f)]);
                mor[f]
                    .or_else(|| Some((unique_arrow(&a, s.0, t.0)?, unique_arrow(&bb, s.1, t.1)?)))
                    .map(|(fa, fb)| base.pair_mor(fa, fb))
                    .ok_or_else(|| parse_error(&b.header[0], format!("no image for morphism {}", x.morphism_name(f))))
            })
            .collect::<Result<Vec<_>>>()?;
        let obj = obj.iter().map(|&(p, q)| base.pair_obj(p, q)).collect();
        let proj = FinFunctor::new(x, base.cat.clone(), obj, mor).map_err(|e| in_block(b, e))?;
        FibredFunctor::new(proj, base).map_err(|e| in_block(b, e))
    }

    fn parse_diagram(&self, b: &Block) -> Result<CatDiagram> {
        let index = self.category(&b.header[2])?;
        let mut values = vec![None; index.num_objects()];
        for e in b.entries("VALUES") {
            let a = obj_of(&index, &e[0])?;
            if values[a].replace(self.category(&e[1])?).is_some() {
                return Err(parse_error(&e[0], format!("value at {} given twice", e[0].text)));
            }
        }
        let values = index
            .objects()
            .map(|a| values[a].clone().ok_or_else(|| parse_error(&b.header[0], format!("no value at {}", index.object_name(a)))))
            .collect::<Result<Vec<_>>>()?;
        let mut functors = vec![None; index.num_morphisms()];
        for a in index.objects() {
            functors[index.id(a)] = Some(FinFunctor::identity(&values[a]));
        }
        for e in b.entries("ACTIONS") {
            let f = mor_of(&index, &e[0])?;
            if index.is_identity(f) || functors[f].replace(self.functor(&e[1])?).is_some() {
                return Err(parse_error(&e[0], format!("action of {} given twice", e[0].text)));
            }
        }
        let functors = index
            .morphism_ids()
            .map(|f| functors[f].clone().ok_or_else(|| parse_error(&b.header[0], format!("no action for {}", index.morphism_name(f)))))
            .collect::<Result<Vec<_>>>()?;
        let mut compositors: HashMap<(Mor, Mor), Vec<Mor>> = HashMap::new();
        for e in b.entries("COMPOSITORS") {
            let (g, f) = (mor_of(&index, &e[0])?, mor_of(&index, &e[1])?);
            let Some(gf) = index.try_compose(g, f) else {
                return Err(parse_error(&e[0], format!("{} and {} are not composable", e[0].text, e[1].text)));
            };
            let (src, dst) = (&values[index.src(f)], &values[index.dst(g)]);
            let x = obj_of(src, &e[2])?;
            let from = functors[gf].obj(x);
            let to = functors[g].obj(functors[f].obj(x));
            let m = expect_arrow(dst, mor_of(dst, &e[3])?, from, to, &e[3])?;
            let comps = compositors.entry((g, f)).or_insert_with(|| {
                src.objects().map(|x| dst.id(functors[gf].obj(x))).collect()
            });
            comps[x] = m;
        }
        CatDiagram::new(index, values, functors, compositors).map_err(|e| in_block(b, e))
    }

    fn parse_adjunction(&self, b: &Block) -> Result<Adjunction> {
        let (left, right) = (self.functor(&b.header[2])?, self.functor(&b.header[3])?);
        if **left.source() != **right.target() || **left.target() != **right.source() {
            return Err(parse_error(&b.header[3], "the functors are not parallel in opposite directions"));
        }
        let (c, d) = (left.source().clone(), left.target().clone());
        let read = |section: &str, cat: &FinCat, ends: &dyn Fn(Obj) -> (Obj, Obj)| -> Result<Vec<Mor>> {
            let mut comps = vec![None; cat.num_objects()];
            for e in b.entries(section) {
                let x = obj_of(cat, &e[0])?;
                let (s, t) = ends(x);
                comps[x] = Some(expect_arrow(cat, mor_of(cat, &e[1])?, s, t, &e[1])?);
            }
            cat.objects()
                .map(|x| {
                    let (s, t) = ends(x);
                    comps[x].or_else(|| unique_arrow(cat, s, t)).ok_or_else(|| {
                        parse_error(&b.header[0], format!("no {} component at {}", section.to_lowercase(), cat.object_name(x)))
                    })
                })
                .collect()
        };
        let unit = read("UNIT", &c, &|x| (x, right.obj(left.obj(x))))?;
        let counit = read("COUNIT", &d, &|y| (left.obj(right.obj(y)), y))?;
        Adjunction::new(left, right, unit, counit).map_err(|e| in_block(b, e))
    }

    fn parse_transformation(&self, b: &Block) -> Result<LaxTransformation> {
        let (x, y) = (self.diagram(&b.header[2])?, self.diagram(&b.header[3])?);
        if *x.index != *y.index {
            return Err(parse_error(&b.header[3], "the diagrams have different indices"));
        }
        let base = x.index.clone();
        let mut comps = vec![None; base.num_objects()];
        for e in b.entries("COMPONENTS") {
            let a = obj_of(&base, &e[0])?;
            if comps[a].replace(self.functor(&e[1])?).is_some() {
                return Err(parse_error(&e[0], format!("component at {} given twice", e[0].text)));
            }
        }
        let comps = base
            .objects()
            .map(|a| comps[a].clone().ok_or_else(|| parse_error(&b.header[0], format!("no component at {}", base.object_name(a)))))
            .collect::<Result<Vec<_>>>()?;
        for a in base.objects() {
            if **comps[a].source() != **x.value(a) || **comps[a].target() != **y.value(a) {
                return Err(parse_error(&b.header[0], format!("component at {} has the wrong endpoints", base.object_name(a))));
            }
        }
        // cell at f: x ↦ (f^Y G_a x -> G_a' f^X x)
        let ends = |f: Mor, o: Obj| (y.functor(f).obj(comps[base.src(f)].obj(o)), comps[base.dst(f)].obj(x.functor(f).obj(o)));
        let mut cells: Vec<Vec<Option<Mor>>> = base.morphism_ids().map(|f| vec![None; x.value(base.src(f)).num_objects()]).collect();
        for e in b.entries("CELLS") {
            let f = mor_of(&base, &e[0])?;
            let o = obj_of(x.value(base.src(f)), &e[1])?;
            let v = y.value(base.dst(f));
            let (s, t) = ends(f, o);
            cells[f][o] = Some(expect_arrow(v, mor_of(v, &e[2])?, s, t, &e[2])?);
        }
        let cells = base
            .morphism_ids()
            .map(|f| {
                let v = y.value(base.dst(f));
                (0..cells[f].len())
                    .map(|o| {
                        let (s, t) = ends(f, o);
                        let fallback = if base.is_identity(f) && s == t { Some(v.id(s)) } else { unique_arrow(v, s, t) };
                        cells[f][o].or(fallback).ok_or_else(|| {
                            parse_error(&b.header[0], format!("no cell at {} and {}", base.morphism_name(f), x.value(base.src(f)).object_name(o)))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LaxTransformation::from_components(x, y, comps, cells).map_err(|e| in_block(b, e))
    }

    fn parse_monoidal(&self, b: &Block) -> Result<StrictMonCat> {
        let c = self.category(&b.header[2])?;
        let unit = obj_of(&c, &b.header[3])?;
        let square = product(&c, &c);
        let mut obj = vec![None; square.cat.num_objects()];
        for e in b.entries("OBJECTS") {
            let (p, q) = (obj_of(&c, &e[0])?, obj_of(&c, &e[1])?);
            if obj[square.pair_obj(p, q)].replace(obj_of(&c, &e[2])?).is_some() {
                return Err(parse_error(&e[0], format!("product of {} and {} given twice", e[0].text, e[1].text)));
            }
        }
        let obj = c
            .objects()
            .flat_map(|p| c.objects().map(move |q| (p, q)))
            .map(|(p, q)| {
                obj[square.pair_obj(p, q)].ok_or_else(|| {
                    parse_error(&b.header[0], format!("no product of {} and {}", c.object_name(p), c.object_name(q)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ends = |f: Mor, g: Mor| {
            (obj[square.pair_obj(c.src(f), c.src(g))], obj[square.pair_obj(c.dst(f), c.dst(g))])
        };
        let mut mor = vec![None; square.cat.num_morphisms()];
        for e in b.entries("MORPHISMS") {
            let (f, g) = (mor_of(&c, &e[0])?, mor_of(&c, &e[1])?);
            let (s, t) = ends(f, g);
            mor[square.pair_mor(f, g)] = Some(expect_arrow(&c, mor_of(&c, &e[2])?, s, t, &e[2])?);
        }
        let mor = c
            .morphism_ids()
            .flat_map(|f| c.morphism_ids().map(move |g| (f, g)))
            .map(|(f, g)| {
                let (s, t) = ends(f, g);
                let fallback = if c.is_identity(f) && c.is_identity(g) { Some(c.id(s)) } else { unique_arrow(&c, s, t) };
                mor[square.pair_mor(f, g)].or(fallback).ok_or_else(|| {
                    parse_error(&b.header[0], format!("no product of {} and {}", c.morphism_name(f), c.morphism_name(g)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        StrictMonCat::new(c, obj, mor, unit).map_err(|e| in_block(b, e))
    }

    fn parse_lax_monoidal(&self, b: &Block) -> Result<LaxMonFunctor> {
        let (m, n) = (self.monoidal(&b.header[2])?, self.monoidal(&b.header[3])?);
        let g = self.functor(&b.header[4])?;
        if **g.source() != *m.carrier || **g.target() != *n.carrier {
            return Err(parse_error(&b.header[4], "the functor does not run between the carriers"));
        }
        let (c, d) = (m.carrier.clone(), n.carrier.clone());
        let ends = |p: Obj, q: Obj| (n.tensor_obj(g.obj(p), g.obj(q)), g.obj(m.tensor_obj(p, q)));
        let mut mu = vec![None; m.square.cat.num_objects()];
        for e in b.entries("MU") {
            let (p, q) = (obj_of(&c, &e[0])?, obj_of(&c, &e[1])?);
            let (s, t) = ends(p, q);
            mu[m.square.pair_obj(p, q)] = Some(expect_arrow(&d, mor_of(&d, &e[2])?, s, t, &e[2])?);
        }
        let mu = c
            .objects()
            .flat_map(|p| c.objects().map(move |q| (p, q)))
            .map(|(p, q)| {
                let (s, t) = ends(p, q);
                mu[m.square.pair_obj(p, q)].or_else(|| unique_arrow(&d, s, t)).ok_or_else(|| {
                    parse_error(&b.header[0], format!("no MU entry at {} and {}", c.object_name(p), c.object_name(q)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (s, t) = (n.unit, g.obj(m.unit));
        let mu0 = match b.entries("MU0") {
            [] => unique_arrow(&d, s, t).ok_or_else(|| parse_error(&b.header[0], "no MU0 entry"))?,
            [e] => expect_arrow(&d, mor_of(&d, &e[0])?, s, t, &e[0])?,
            [_, e, ..] => return Err(parse_error(&e[0], "MU0 given twice")),
        };
        LaxMonFunctor::new(m, n, g, mu, mu0).map_err(|e| in_block(b, e))
    }
}

/// Parses a document. Syntax and reference errors are `Error::Parse`;
/// blocks that are well formed but violate an axiom give the error of the
/// failing construction.
pub fn parse(text: &str) -> Result<Document> {
    let mut p = Parser { doc: Document::new() };
    for b in split_blocks(text)? {
        p.block(&b)?;
    }
    Ok(p.doc)
}

// ---------------------------------------------------------- serialization

fn section(out: &mut String, name: &str, lines: BTreeSet<String>) {
    if lines.is_empty() {
        return;
    }
    out.push_str(name);
    out.push('\n');
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
}

impl Document {
    fn cat_ref(&self, c: &FinCat) -> &str {
        self.category_name(c).expect("categories are added before their users")
    }

    /// Canonical text: blocks in order, entries sorted, identities and
    /// entries determined by thin hom-sets left out.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut names: HashMap<String, Names> = HashMap::new();
        for (n, item) in &self.items {
            if let Item::Category(c) = item {
                names.insert(n.clone(), Names::of(c));
            }
        }
        let named = |c: &FinCat| -> &Names { &names[self.cat_ref(c)] };
        for (n, item) in &self.items {
            if !out.is_empty() {
                out.push('\n');
            }
            match item {
                Item::Category(c) => {
                    let nm = named(c);
                    let _ = writeln!(out, "CATEGORY {n}");
                    section(&mut out, "OBJECTS", nm.objects.iter().cloned().collect());
                    let arrows: Vec<Mor> = c.morphism_ids().filter(|&f| !c.is_identity(f)).collect();
                    section(
                        &mut out,
                        "MORPHISMS",
                        arrows
                            .iter()
                            .map(|&f| format!("{} {} {}", nm.morphisms[f], nm.objects[c.src(f)], nm.objects[c.dst(f)]))
                            .collect(),
                    );
                    let mut compose = BTreeSet::new();
                    for &f in &arrows {
                        for &g in c.out_of(c.dst(f)).iter().filter(|&&g| !c.is_identity(g)) {
                            if c.hom(c.src(f), c.dst(g)).len() > 1 {
                                let gf = c.compose(g, f);
                                compose.insert(format!("{} {} {}", nm.morphisms[g], nm.morphisms[f], nm.morphisms[gf]));
                            }
                        }
                    }
                    section(&mut out, "COMPOSE", compose);
                }
                Item::Functor(f) => {
                    let (c, d) = (f.source(), f.target());
                    let (nc, nd) = (named(c), named(d));
                    let _ = writeln!(out, "FUNCTOR {n} {} {}", self.cat_ref(c), self.cat_ref(d));
                    section(&mut out, "OBJECTS", c.objects().map(|x| format!("{} {}", nc.objects[x], nd.objects[f.obj(x)])).collect());
                    section(
                        &mut out,
                        "MORPHISMS",
                        c.morphism_ids()
                            .filter(|&m| !c.is_identity(m) && d.hom(f.obj(c.src(m)), f.obj(c.dst(m))).len() > 1)
                            .map(|m| format!("{} {}", nc.morphisms[m], nd.morphisms[f.mor(m)]))
                            .collect(),
                    );
                }
                Item::Triple(t) => {
                    let c = &t.carrier;
                    let nc = named(c);
                    let _ = writeln!(out, "TRIPLE {n} {}", self.cat_ref(c));
                    let class = |w: &WideSubcat| -> BTreeSet<String> {
                        c.morphism_ids().filter(|&f| !c.is_identity(f) && w.contains(f)).map(|f| nc.morphisms[f].clone()).collect()
                    };
                    section(&mut out, "INGRESSIVE", class(&t.ingressives));
                    section(&mut out, "EGRESSIVE", class(&t.egressives));
                }
                Item::Fibration(p) => {
                    let (x, a, b) = (p.total(), p.base_a(), p.base_b());
                    let (nx, na, nb) = (named(x), named(a), named(b));
                    let _ = writeln!(out, "FIBRATION {n} {} {} {}", self.cat_ref(x), self.cat_ref(a), self.cat_ref(b));
                    let (first, second) = (&p.base.first, &p.base.second);
                    section(
                        &mut out,
                        "OBJECTS",
                        x.objects()
                            .map(|o| {
                                let s = p.proj.obj(o);
                                format!("{} {} {}", nx.objects[o], na.objects[first.obj(s)], nb.objects[second.obj(s)])
                            })
                            .collect(),
                    );
                    let base = &p.base.cat;
                    section(
                        &mut out,
                        "MORPHISMS",
                        x.morphism_ids()
                            .filter(|&f| !x.is_identity(f) && base.hom(p.proj.obj(x.src(f)), p.proj.obj(x.dst(f))).len() > 1)
                            .map(|f| {
                                let m = p.proj.mor(f);
                                format!("{} {} {}", nx.morphisms[f], na.morphisms[first.mor(m)], nb.morphisms[second.mor(m)])
                            })
                            .collect(),
                    );
                }
                Item::Diagram(d) => {
                    let i = &d.index;
                    let ni = named(i);
                    let _ = writeln!(out, "DIAGRAM {n} {}", self.cat_ref(i));
                    section(&mut out, "VALUES", i.objects().map(|a| format!("{} {}", ni.objects[a], self.cat_ref(d.value(a)))).collect());
                    section(
                        &mut out,
                        "ACTIONS",
                        i.morphism_ids()
                            .filter(|&f| !i.is_identity(f))
                            .map(|f| format!("{} {}", ni.morphisms[f], self.functor_name(d.functor(f)).expect("actions are added first")))
                            .collect(),
                    );
                    let mut comps = BTreeSet::new();
                    for f in i.morphism_ids() {
                        for &g in i.out_of(i.dst(f)) {
                            let (src, dst) = (d.value(i.src(f)), d.value(i.dst(g)));
                            let (ns, nd) = (named(src), named(dst));
                            for o in src.objects() {
                                let m = d.compositor(g, f, o);
                                if !dst.is_identity(m) {
                                    comps.insert(format!("{} {} {} {}", ni.morphisms[g], ni.morphisms[f], ns.objects[o], nd.morphisms[m]));
                                }
                            }
                        }
                    }
                    section(&mut out, "COMPOSITORS", comps);
                }
                Item::Adjunction(adj) => {
                    let (c, d) = (adj.left.source(), adj.left.target());
                    let (nc, nd) = (named(c), named(d));
                    let fname = |f: &FinFunctor| self.functor_name(f).expect("functors are added first").to_string();
                    let _ = writeln!(out, "ADJUNCTION {n} {} {}", fname(&adj.left), fname(&adj.right));
                    let ambiguous = |cat: &FinCat, m: Mor| cat.hom(cat.src(m), cat.dst(m)).len() > 1;
                    section(
                        &mut out,
                        "UNIT",
                        c.objects().filter(|&x| ambiguous(c, adj.eta(x))).map(|x| format!("{} {}", nc.objects[x], nc.morphisms[adj.eta(x)])).collect(),
                    );
                    section(
                        &mut out,
                        "COUNIT",
                        d.objects()
                            .filter(|&y| ambiguous(d, adj.epsilon(y)))
                            .map(|y| format!("{} {}", nd.objects[y], nd.morphisms[adj.epsilon(y)]))
                            .collect(),
                    );
                }
                Item::Transformation(t) => {
                    let base = &t.base;
                    let nb = named(base);
                    let dname = |d: &CatDiagram| self.diagram_name(d).expect("diagrams are added first").to_string();
                    let _ = writeln!(out, "TRANSFORMATION {n} {} {}", dname(&t.source), dname(&t.target));
                    section(
                        &mut out,
                        "COMPONENTS",
                        base.objects()
                            .map(|a| format!("{} {}", nb.objects[a], self.functor_name(&t.components[a]).expect("components are added first")))
                            .collect(),
                    );
                    let mut cells = BTreeSet::new();
                    for f in base.morphism_ids() {
                        let (src, dst) = (t.source.value(base.src(f)), t.target.value(base.dst(f)));
                        let (ns, nd) = (named(src), named(dst));
                        for o in src.objects() {
                            let m = t.cells[f].component(o);
                            let trivial = if base.is_identity(f) { dst.is_identity(m) } else { dst.hom(dst.src(m), dst.dst(m)).len() == 1 };
                            if !trivial {
                                cells.insert(format!("{} {} {}", nb.morphisms[f], ns.objects[o], nd.morphisms[m]));
                            }
                        }
                    }
                    section(&mut out, "CELLS", cells);
                }
                Item::Monoidal(m) => {
                    let c = &m.carrier;
                    let nc = named(c);
                    let _ = writeln!(out, "MONOIDAL {n} {} {}", self.cat_ref(c), nc.objects[m.unit]);
                    let mut objs = BTreeSet::new();
                    for p in c.objects() {
                        for q in c.objects() {
                            objs.insert(format!("{} {} {}", nc.objects[p], nc.objects[q], nc.objects[m.tensor_obj(p, q)]));
                        }
                    }
                    section(&mut out, "OBJECTS", objs);
                    let mut mors = BTreeSet::new();
                    for f in c.morphism_ids() {
                        for g in c.morphism_ids() {
                            if c.is_identity(f) && c.is_identity(g) {
                                continue;
                            }
                            let h = m.tensor_mor(f, g);
                            if c.hom(c.src(h), c.dst(h)).len() > 1 {
                                mors.insert(format!("{} {} {}", nc.morphisms[f], nc.morphisms[g], nc.morphisms[h]));
                            }
                        }
                    }
                    section(&mut out, "MORPHISMS", mors);
                }
                Item::LaxMonoidal(g) => {
                    let (c, d) = (&g.source.carrier, &g.target.carrier);
                    let (nc, nd) = (named(c), named(d));
                    let _ = writeln!(
                        out,
                        "LAXMONOIDAL {n} {} {} {}",
                        self.monoidal_name(&g.source).expect("monoidal categories are added first"),
                        self.monoidal_name(&g.target).expect("monoidal categories are added first"),
                        self.functor_name(&g.underlying).expect("functors are added first")
                    );
                    let mut mu = BTreeSet::new();
                    for p in c.objects() {
                        for q in c.objects() {
                            let m = g.mu_at(p, q);
                            if d.hom(d.src(m), d.dst(m)).len() > 1 {
                                mu.insert(format!("{} {} {}", nc.objects[p], nc.objects[q], nd.morphisms[m]));
                            }
                        }
                    }
                    section(&mut out, "MU", mu);
                    if d.hom(d.src(g.mu0), d.dst(g.mu0)).len() > 1 {
                        section(&mut out, "MU0", [nd.morphisms[g.mu0].clone()].into());
                    }
                }
            }
            out.push_str("END\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualize::arrow_fibration;
    use crate::fincat::enumerate_functors;
    use crate::grothendieck::strict_diagrams;
    use crate::shapes::{simplex, twisted_arrow_cat};

    const INTERVAL: &str = "CATEGORY I\nOBJECTS\n0 1\nMORPHISMS\nu 0 1\nEND\n";

    fn category(doc: &Document, name: &str) -> Arc<FinCat> {
        match doc.get(name) {
            Some(Item::Category(c)) => c.clone(),
            other => panic!("{name} is {other:?}"),
        }
    }

    fn round_trips(doc: &Document) {
        let text = doc.serialize();
        let again = parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(again.serialize(), text);
    }

    fn location(text: &str) -> (usize, usize) {
        match parse(text) {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn interval_document() {
        let doc = parse(INTERVAL).unwrap();
        let c = category(&doc, "I");
        assert_eq!((c.num_objects(), c.num_morphisms()), (2, 3));
        let simplex1 = Arc::new(simplex(1));
        assert!(enumerate_functors(&c, &simplex1).unwrap().iter().any(|f| f.is_isomorphism()));
        assert_eq!(doc.serialize(), "CATEGORY I\nOBJECTS\n0\n1\nMORPHISMS\nu 0 1\nEND\n");
        assert_eq!(doc.kind(), Some("category"));
    }

    #[test]
    fn compositions_and_their_errors() {
        // Z/2 needs its composite spelled out
        let z2 = "CATEGORY Z\nOBJECTS\nx\nMORPHISMS\ng x x\nCOMPOSE\ng g id_x\nEND\n";
        let c = category(&parse(z2).unwrap(), "Z");
        assert!(c.is_groupoid() && c.num_morphisms() == 2);
        round_trips(&parse(z2).unwrap());
        assert_eq!(location("CATEGORY Z\nOBJECTS\nx\nMORPHISMS\ng x x\nEND\n"), (1, 1));
        assert_eq!(location("CATEGORY Z\nOBJECTS\nx\nMORPHISMS\ng x x\nCOMPOSE\ng g\nEND\n"), (7, 1));
        let two = "CATEGORY C\nOBJECTS\nx y\nMORPHISMS\nf x y\ng x y\nCOMPOSE\ng f f\nEND\n";
        assert_eq!(location(two), (8, 1));
        let wrong = "CATEGORY C\nOBJECTS\nx y\nMORPHISMS\nf x y\nh y x\nCOMPOSE\nh f f\nEND\n";
        assert_eq!(location(wrong), (8, 5));
        // an idempotent is just as welcome
        let idem = "CATEGORY E\nOBJECTS\nx\nMORPHISMS\ne x x\nCOMPOSE\ne e e\nEND\n";
        assert!(!category(&parse(idem).unwrap(), "E").is_groupoid());
    }

    #[test]
    fn syntax_errors_carry_locations() {
        assert_eq!(location("OBJECTS\n"), (1, 1));
        assert_eq!(location("CATEGORY\n"), (1, 1));
        assert_eq!(location("CATEGORY C\nOBJECTS\nx\n"), (1, 1));
        assert_eq!(location("CATEGORY C\nx\nEND\n"), (2, 1));
        assert_eq!(location("CATEGORY C\nOBJECTS\nx x\nEND\n"), (3, 3));
        assert_eq!(location("CATEGORY C\nOBJECTS\nx\nMORPHISMS\nf x  zz\nEND\n"), (5, 6));
        assert_eq!(location(&format!("{INTERVAL}{INTERVAL}")), (7, 10));
        assert_eq!(location(&format!("{INTERVAL}FUNCTOR F I J\nEND\n")), (7, 13));
        assert_eq!(location(&format!("{INTERVAL}FUNCTOR F I I\nOBJECTS\n0 0\nEND\n")), (7, 1));
        assert_eq!(location("  CATEGORY C # note\nOBJECTS\nEND extra\n"), (3, 5));
    }

    #[test]
    fn functors_fill_in_thin_images() {
        let text = format!("{INTERVAL}FUNCTOR F I I\nOBJECTS\n0 0\n1 1\nEND\n");
        let doc = parse(&text).unwrap();
        let Some(Item::Functor(f)) = doc.get("F") else { panic!() };
        assert!(f.is_isomorphism());
        round_trips(&doc);
        // reversing the interval is not a functor
        let text = format!("{INTERVAL}FUNCTOR F I I\nOBJECTS\n0 1\n1 0\nEND\n");
        assert!(matches!(parse(&text), Err(Error::Parse { line: 7, .. })));
    }

    #[test]
    fn invalid_triples_are_construction_errors() {
        let text = "CATEGORY C\nOBJECTS\nx y z\nMORPHISMS\nf x z\ng y z\nEND\nTRIPLE T C\nINGRESSIVE\nf\nEGRESSIVE\ng\nEND\n";
        match parse(text) {
            Err(Error::InvalidTriple(m)) => assert!(m.contains("TRIPLE T (line 8)") && m.contains("no pullback")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generated_documents_round_trip() {
        let mut doc = Document::new();
        let tw = twisted_arrow_cat(&Arc::new(simplex(2)));
        doc.push_category("tw", &tw.cat);
        doc.push_functor("proj", &tw.proj);
        doc.push_fibration("arrows", &arrow_fibration(&Arc::new(simplex(2))));
        doc.push_fibration("iso", &arrow_fibration(&Arc::new(FinCat::walking_iso())));
        let index = Arc::new(simplex(1));
        let values = [Arc::new(simplex(1)), Arc::new(FinCat::cyclic_group(2))];
        for (k, d) in strict_diagrams(&index, &values).unwrap().iter().enumerate() {
            doc.push_diagram(&format!("d{k}"), d);
        }
        round_trips(&doc);
        let names = doc.items().iter().map(|(n, _)| n.clone()).collect::<HashSet<_>>();
        assert_eq!(names.len(), doc.items().len());
    }

    #[test]
    fn awkward_names_are_sanitized() {
        let c = FinCat::preorder(vec!["a b".into(), "END".into(), "#c".into()], |x, y| x <= y).unwrap();
        let mut doc = Document::new();
        doc.push_category("my cat", &Arc::new(c));
        let text = doc.serialize();
        assert!(text.starts_with("CATEGORY my_cat\nOBJECTS\nEND_\n_c\na_b\nMORPHISMS\nEND->_c END_ _c\n"));
        round_trips(&doc);
    }
}
