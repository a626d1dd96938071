use std::collections::HashMap;

use liftcert::graphs::RegularGraph;
use liftcert::hikes::{connected_subgraphs, decode_graph, encode_graph, EncodingMode, GraphEncoding, Subgraph};

fn ambient() -> Vec<(&'static str, RegularGraph)> {
    vec![
        ("K4", RegularGraph::complete(4)),
        ("C8", RegularGraph::cycle(8)),
        ("Petersen", RegularGraph::petersen()),
    ]
}

#[test]
fn roundtrip_is_identity_on_small_subgraphs() {
    for (name, g) in ambient() {
        let subs = connected_subgraphs(&g, 6, usize::MAX).unwrap();
        assert!(!subs.is_empty());
        for h in &subs {
            for &start in &h.vertices {
                for mode in [EncodingMode::I, EncodingMode::II] {
                    let enc = encode_graph(&g, h, start, mode).unwrap();
                    let back = decode_graph(&enc, &g).unwrap();
                    assert_eq!(&back, h, "{name}, start {start}, {mode:?}");
                }
            }
        }
    }
}

#[test]
fn encodings_are_injective_per_start_and_mode() {
    for (name, g) in ambient() {
        let subs = connected_subgraphs(&g, 6, usize::MAX).unwrap();
        for mode in [EncodingMode::I, EncodingMode::II] {
            let mut seen: HashMap<GraphEncoding, &Subgraph> = HashMap::new();
            for h in &subs {
                for &start in &h.vertices {
                    let enc = encode_graph(&g, h, start, mode).unwrap();
                    if let Some(prev) = seen.insert(enc, h) {
                        panic!("{name}: {prev:?} and {h:?} share an encoding");
                    }
                }
            }
        }
    }
}

#[test]
fn cycle_subgraph_counts() {
    // paths of e edges in C8: 8 for each e < 8
    let c8 = RegularGraph::cycle(8);
    let subs = connected_subgraphs(&c8, 6, usize::MAX).unwrap();
    for e in 1..=6 {
        assert_eq!(subs.iter().filter(|h| h.num_edges() == e).count(), 8);
    }
}
