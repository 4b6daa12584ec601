#![no_main]

use libfuzzer_sys::fuzz_target;
use spancat::cli::{run, Options, OutputFormat, Verb, EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_USAGE};

const VERBS: [Verb; 8] = [
    Verb::Validate,
    Verb::Classify,
    Verb::Span,
    Verb::Dualize,
    Verb::Straighten,
    Verb::Unstraighten,
    Verb::Mate,
    Verb::MonoidalMate,
];

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let verb = &VERBS[pick as usize % VERBS.len()];
    let opts = Options { output: OutputFormat::Json, budget: Some(100_000), seed: None };
    let outcome = run(verb, text, &opts);
    assert!([EXIT_PASS, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_BUDGET].contains(&outcome.code));
});
