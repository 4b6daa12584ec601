//! Command execution behind the `spancat` binary: each verb reads a
//! document, acts on its last block and produces a deterministic report.

pub mod document;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

pub use document::{parse, sanitize, Document, Item};

use crate::dualize::{dual_cc, fiber_preservation_check, straightening_compatibility_check};
use crate::error::Error;
use crate::fibrations::{classify, FibredFunctor, Witness};
use crate::fincat::{product, set_search_budget, FinCat, FinFunctor};
use crate::grothendieck::{straighten_ortho, unstraighten_cc};
use crate::mates::{double_mate_check, find_left_adjoint, left_adjoints, mate_of_lax, mate_via_dualization, oplax_agree};
use crate::mates::validate_adjunction;
use crate::monoidal::{doctrinal_mate, doctrinal_round_trip};
use crate::shapes::simplex;
use crate::triplespan::span_homotopy_category;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub output: OutputFormat,
    pub budget: Option<u64>,
    /// Echoed in every report; no verb is randomized.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verb {
    Validate,
    Classify,
    Span,
    Dualize,
    Straighten,
    Unstraighten,
    Mate,
    MonoidalMate,
    /// Runs the acceptance criteria, all of them when the list is empty.
    Selftest(Vec<usize>),
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Classify => "classify",
            Verb::Span => "span",
            Verb::Dualize => "dualize",
            Verb::Straighten => "straighten",
            Verb::Unstraighten => "unstraighten",
            Verb::Mate => "mate",
            Verb::MonoidalMate => "monoidal-mate",
            Verb::Selftest(_) => "selftest",
        }
    }
}

/// Exit code and rendered report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

/// Report fields in order, an optional document, and the exit code.
struct Report {
    fields: Vec<(String, Value)>,
    document: Option<String>,
    code: i32,
}

impl Report {
    fn new() -> Self {
        Report { fields: Vec::new(), document: None, code: EXIT_PASS }
    }

    fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    /// Records a check; a failure sets the exit code and adds its witness.
    fn check(&mut self, key: &str, passed: bool, witness: Option<String>) -> &mut Self {
        self.field(key, passed);
        if !passed {
            self.code = EXIT_CHECK_FAILED;
            if let Some(w) = witness {
                self.field(&format!("{key}_witness"), w);
            }
        }
        self
    }
}

fn render(verb: &str, opts: &Options, report: &Report) -> String {
    let mut fields = vec![("command".to_string(), Value::from(verb))];
    if let Some(s) = opts.seed {
        fields.push(("seed".into(), s.into()));
    }
    fields.push(("passed".into(), (report.code == EXIT_PASS).into()));
    fields.extend(report.fields.iter().cloned());
    match opts.output {
        OutputFormat::Json => {
            let mut map = Map::new();
            for (k, v) in fields {
                map.insert(k, v);
            }
            if let Some(d) = &report.document {
                map.insert("document".into(), d.clone().into());
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            // with a document attached the report becomes its leading
            // comment, so the output can be fed to the next command
            let lead = if report.document.is_some() { "# " } else { "" };
            let mut s = String::new();
            for (k, v) in fields {
                match v {
                    Value::String(t) => s.push_str(&format!("{lead}{k}: {t}\n")),
                    Value::Array(items) if items.iter().all(Value::is_string) => {
                        s.push_str(&format!("{lead}{k}:\n"));
                        for i in items {
                            s.push_str(&format!("{lead}  {}\n", i.as_str().unwrap_or_default()));
                        }
                    }
                    other => s.push_str(&format!("{lead}{k}: {other}\n")),
                }
            }
            if let Some(d) = &report.document {
                s.push('\n');
                s.push_str(d);
            }
            s
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_USAGE,
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        _ => EXIT_CHECK_FAILED,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidCategory(_) => "InvalidCategory",
        Error::InvalidFunctor(_) => "InvalidFunctor",
        Error::InvalidTransformation(_) => "InvalidTransformation",
        Error::InvalidSubcategory(_) => "InvalidSubcategory",
        Error::BudgetExceeded(_) => "BudgetExceeded",
        Error::MissingLifts(_) => "MissingLifts",
        Error::MissingCartesianLifts(_) => "MissingCartesianLifts",
        Error::InvalidTriple(_) => "InvalidTriple",
        Error::BaseMismatch(_) => "BaseMismatch",
        Error::NotCocartesian(_) => "NotCocartesian",
        Error::NotOrtho(_) => "NotOrtho",
        Error::ShapeMismatch(_) => "ShapeMismatch",
        Error::MissingLeftAdjoint(_) => "MissingLeftAdjoint",
        Error::NotSegal(_) => "NotSegal",
        Error::IncoherentLaxStructure(_) => "IncoherentLaxStructure",
        Error::IncoherentDiagram(_) => "IncoherentDiagram",
        Error::InvalidDiagram(_) => "InvalidDiagram",
        Error::Parse { .. } => "ParseError",
    }
}

/// Runs `verb` on the document text `input`.
pub fn run(verb: &Verb, input: &str, opts: &Options) -> Outcome {
    if let Some(b) = opts.budget {
        set_search_budget(b);
    }
    let result = match verb {
        Verb::Selftest(only) => selftest(only),
        _ => parse(input).map_err(Failure::from).and_then(|doc| dispatch(verb, &doc)),
    };
    let report = match result {
        Ok(r) => r,
        Err(f) => {
            let mut r = Report::new();
            match f {
                Failure::Usage(msg) => {
                    r.code = EXIT_USAGE;
                    r.field("error", "UsageError").field("message", msg);
                }
                Failure::Engine(e) => {
                    r.code = exit_code(&e);
                    r.field("error", error_kind(&e)).field("message", e.to_string());
                    if let Error::Parse { line, column, .. } = e {
                        r.field("line", line).field("column", column);
                    }
                }
            }
            r
        }
    };
    Outcome { code: report.code, output: render(verb.name(), opts, &report) }
}

fn dispatch(verb: &Verb, doc: &Document) -> Result<Report, Failure> {
    if let Verb::Validate = verb {
        return validate(doc);
    }
    let (name, item) = doc.subject().ok_or_else(|| Failure::Usage("the document is empty".into()))?;
    let wrong = |expected: &str| Failure::Usage(format!("{} needs a {expected}, the last block is a {}", verb.name(), item.kind()));
    match (verb, item) {
        (Verb::Classify, Item::Fibration(p)) => Ok(classify_report(p)),
        (Verb::Classify, _) => Err(wrong("fibration")),
        (Verb::Span, Item::Triple(t)) => {
            let spans = span_homotopy_category(t)?;
            let mut r = Report::new();
            r.field("objects", spans.cat.num_objects())
                .field("morphisms", spans.cat.num_morphisms())
                .field("automorphisms_trivial", spans.automorphisms_trivial());
            let mut out = Document::new();
            out.push_category(&format!("{name}_spans"), &spans.cat);
            r.document = Some(out.serialize());
            Ok(r)
        }
        (Verb::Span, _) => Err(wrong("triple")),
        (Verb::Dualize, Item::Fibration(p)) => dualize(doc, name, p),
        (Verb::Dualize, _) => Err(wrong("fibration")),
        (Verb::Straighten, Item::Fibration(p)) => {
            let d = straighten_ortho(p)?;
            let mut r = Report::new();
            r.field("strict", d.is_strict());
            let v = straightening_compatibility_check(p)?;
            r.check("compatible_with_dualizing", v.passed, v.witness);
            let mut out = Document::new();
            carry_names(doc, &mut out, &[p.base_a(), p.base_b()]);
            out.push_diagram(&format!("{name}_straightened"), &d);
            r.document = Some(out.serialize());
            Ok(r)
        }
        (Verb::Straighten, _) => Err(wrong("fibration")),
        (Verb::Unstraighten, Item::Diagram(d)) => {
            let g = unstraighten_cc(d)?;
            let point = Arc::new(simplex(0));
            let base = product(&d.index, &point);
            let proj = FinFunctor::new(
                g.total.clone(),
                base.cat.clone(),
                g.total.objects().map(|o| base.pair_obj(g.proj.obj(o), 0)).collect(),
                g.total.morphism_ids().map(|m| base.pair_mor(g.proj.mor(m), point.id(0))).collect(),
            )?;
            let p = FibredFunctor::new(proj, base)?;
            let mut r = Report::new();
            r.field("objects", g.total.num_objects()).field("morphisms", g.total.num_morphisms());
            let mut out = Document::new();
            carry_names(doc, &mut out, &[&d.index]);
            out.push_category("pt", &point);
            out.push_category(&format!("{name}_total"), &g.total);
            out.push_fibration(&format!("{name}_unstraightened"), &p);
            r.document = Some(out.serialize());
            Ok(r)
        }
        (Verb::Unstraighten, _) => Err(wrong("diagram")),
        (Verb::Mate, Item::Transformation(rho)) => {
            let adjs = left_adjoints(rho)?;
            let lambda = mate_of_lax(rho, &adjs)?;
            let dual = mate_via_dualization(rho, &adjs)?;
            let base = &rho.base;
            let mut cells = Vec::new();
            for f in base.morphism_ids().filter(|&f| !base.is_identity(f)) {
                let (y, x) = (rho.target.value(base.src(f)), rho.source.value(base.dst(f)));
                for o in y.objects() {
                    cells.push(format!(
                        "{} {} {}",
                        base.morphism_name(f),
                        y.object_name(o),
                        x.morphism_name(lambda.cells[f].component(o))
                    ));
                }
            }
            let mut r = Report::new();
            r.field("lax_strong", rho.is_strong()).field("mate_strong", lambda.is_strong()).field("mate_cells", cells);
            let v = oplax_agree(&lambda, &dual);
            r.check("agrees_with_dualization", v.passed, v.witness);
            let v = double_mate_check(rho, &adjs)?;
            r.check("round_trip", v.passed, v.witness);
            Ok(r)
        }
        (Verb::Mate, _) => Err(wrong("transformation")),
        (Verb::MonoidalMate, Item::LaxMonoidal(g)) => {
            let adj = find_left_adjoint(&g.underlying)?;
            let f = doctrinal_mate(g, &adj)?;
            let (d, c) = (&g.target.carrier, &g.source.carrier);
            let mut delta = Vec::new();
            for y in d.objects() {
                for z in d.objects() {
                    delta.push(format!("{} {} {}", d.object_name(y), d.object_name(z), c.morphism_name(f.delta_at(y, z))));
                }
            }
            let mut r = Report::new();
            r.field("lax_strong", g.is_strong())
                .field("oplax_strong", f.is_strong())
                .field("delta", delta)
                .field("delta0", c.morphism_name(f.delta0));
            let v = doctrinal_round_trip(g, &adj)?;
            r.check("round_trip", v.passed, v.witness);
            Ok(r)
        }
        (Verb::MonoidalMate, _) => Err(wrong("laxmonoidal")),
        (Verb::Validate, _) | (Verb::Selftest(_), _) => unreachable!("handled above"),
    }
}

/// Registers the categories of the input document under their names.
fn carry_names(from: &Document, to: &mut Document, cats: &[&Arc<FinCat>]) {
    for c in cats {
        if let Some(n) = from.category_name(c) {
            to.push_category(n, c);
        }
    }
}

fn validate(doc: &Document) -> Result<Report, Failure> {
    let mut r = Report::new();
    let items: Vec<String> = doc.items().iter().map(|(n, i)| format!("{} {n}", i.kind())).collect();
    r.field("items", items);
    for (n, item) in doc.items() {
        if let Item::Adjunction(a) = item {
            let v = validate_adjunction(a);
            r.check(&format!("adjunction {n}"), v.passed, v.witness);
        }
    }
    Ok(r)
}

fn describe_witness(p: &FibredFunctor, w: &Witness) -> String {
    let (x, b) = (p.total(), &p.base.cat);
    match *w {
        Witness::MissingLift { base_edge, object } => {
            format!("no lift of {} at {}", b.morphism_name(base_edge), x.object_name(object))
        }
        Witness::Edge(m) => x.morphism_name(m).to_string(),
    }
}

fn classify_report(p: &FibredFunctor) -> Report {
    let report = classify(p);
    let mut r = Report::new();
    for (k, v) in report.flags() {
        r.field(k, v);
    }
    let mut witnesses = Map::new();
    for (k, v) in report.flags() {
        if !v {
            let ws: Vec<String> = report.witnesses_for(k).iter().map(|w| describe_witness(p, w)).collect();
            witnesses.insert(k.to_string(), json!(ws));
        }
    }
    r.field("witnesses", Value::Object(witnesses));
    r
}

fn dualize(doc: &Document, name: &str, p: &FibredFunctor) -> Result<Report, Failure> {
    let d = dual_cc(p)?;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &d.edge_table {
        *counts.entry(e.label()).or_default() += 1;
    }
    let mut r = Report::new();
    r.field("edges", json!(counts));
    let v = fiber_preservation_check(p, &d);
    r.check("fibers_preserved", v.passed, v.witness);
    let mut out = Document::new();
    carry_names(doc, &mut out, &[p.base_a()]);
    let second = doc.category_name(p.base_b()).unwrap_or("second").to_string();
    out.push_category(&format!("{second}_op"), d.fibration.base_b());
    out.push_category(&format!("{name}_dual_total"), d.fibration.total());
    out.push_fibration(&format!("{name}_dual"), &d.fibration);
    r.document = Some(out.serialize());
    Ok(r)
}

fn selftest(only: &[usize]) -> Result<Report, Failure> {
    let mut r = Report::new();
    let mut any = false;
    for c in crate::selftest::criteria() {
        if !only.is_empty() && !only.contains(&c.number) {
            continue;
        }
        let (passed, witness) = match c.run() {
            Ok(v) => (v.passed, v.witness),
            Err(e) => (false, Some(e.to_string())),
        };
        if !passed {
            r.code = EXIT_CHECK_FAILED;
        }
        any = true;
        let status = if passed { "PASS" } else { "FAIL" };
        let line = match witness {
            Some(w) => format!("{status} ({}) {w}", c.title),
            None => format!("{status} ({})", c.title),
        };
        r.field(&format!("criterion {}", c.number), line);
    }
    if !any {
        return Err(Failure::Usage("no criterion has that number".into()));
    }
    Ok(r)
}
