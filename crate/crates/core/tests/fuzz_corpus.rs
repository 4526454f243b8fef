//! Replays the checked-in fuzz corpus, plus byte-level mutations of it,
//! through the same parse/write round-trip the fuzz targets check.

use std::path::PathBuf;

use dpcomb::instances::format::*;
use dpcomb::RngStream;

fn corpus() -> Vec<(String, Vec<u8>)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut out = Vec::new();
    for dir in std::fs::read_dir(&root).expect("fuzz corpus directory") {
        let dir = dir.unwrap().path();
        for f in std::fs::read_dir(&dir).unwrap() {
            let f = f.unwrap().path();
            out.push((f.display().to_string(), std::fs::read(&f).unwrap()));
        }
    }
    out.sort();
    out
}

fn check(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(inst) = parse_instance(text) {
        let written = inst.to_text();
        let again = parse_instance(&written).expect("written instances parse");
        assert_eq!(again, inst);
        assert_eq!(again.to_text(), written);
    }
    macro_rules! typed {
        ($parse:ident, $variant:ident) => {
            if let Ok(x) = $parse(text) {
                let written = Instance::$variant(x.clone()).to_text();
                assert_eq!($parse(&written).expect("written instances parse"), x);
            }
        };
    }
    typed!(parse_graph, Graph);
    typed!(parse_weighted_graph, WeightedGraph);
    typed!(parse_metric, Metric);
    typed!(parse_set_system, SetSystem);
    typed!(parse_submodular, Submodular);
    typed!(parse_terminal_pairs, TerminalPairs);
}

#[test]
fn corpus_seeds_round_trip() {
    let seeds = corpus();
    assert!(seeds.len() >= 7);
    let parsed = seeds
        .iter()
        .filter(|(_, d)| {
            std::str::from_utf8(d)
                .ok()
                .and_then(|t| parse_instance(t).ok())
                .is_some()
        })
        .count();
    assert!(parsed >= 7, "only {parsed} seeds parse");
    for (_, d) in &seeds {
        check(d);
    }
}

#[test]
fn mutated_seeds_never_panic() {
    const ALPHABET: &[u8] = b"0123456789 \n:.-+eE#typngraphedgerowsetcover";
    let seeds = corpus();
    let mut rng = RngStream::new(2024, 0);
    for round in 0..20_000 {
        let (_, base) = &seeds[round % seeds.len()];
        let mut d = base.clone();
        for _ in 0..1 + rng.below(4) {
            let op = rng.below(3);
            let pos = if d.is_empty() { 0 } else { rng.below(d.len()) };
            match op {
                0 if !d.is_empty() => {
                    d.remove(pos);
                }
                1 => d.insert(pos, ALPHABET[rng.below(ALPHABET.len())]),
                _ if !d.is_empty() => d[pos] = ALPHABET[rng.below(ALPHABET.len())],
                _ => {}
            }
        }
        check(&d);
    }
}
