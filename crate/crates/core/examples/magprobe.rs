//! Timing probe for the magnitude search over a whole profile.
//!
//! Usage: magprobe <counts,comma,separated> <k0> <total>

use hamfix_core::graphs::{enumerate_multigraphs_acyclic, DegreeProfile};
use hamfix_core::magnitudes::{default_pinned_pairs, magnitude_assignments, MagnitudeError};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let counts: Vec<usize> = args[1].split(',').map(|s| s.parse().unwrap()).collect();
    let k0: u64 = args[2].parse().unwrap();
    let total: u64 = args[3].parse().unwrap();

    let profile = DegreeProfile::new(counts).unwrap();
    let t0 = Instant::now();
    let graphs = enumerate_multigraphs_acyclic(&profile);
    println!("{} acyclic shapes in {:.2?}", graphs.len(), t0.elapsed());

    let t1 = Instant::now();
    let mut total_nodes = 0u64;
    let mut total_emitted = 0u64;
    let mut skipped_pins = 0usize;
    let mut worst = (0u64, 0usize);
    for (i, g) in graphs.iter().enumerate() {
        let pins = default_pinned_pairs(g);
        let mut count = 0u64;
        match magnitude_assignments(g, k0, total, &pins, |_| count += 1) {
            Ok(stats) => {
                total_nodes += stats.nodes;
                total_emitted += stats.emitted;
                if stats.nodes > worst.0 {
                    worst = (stats.nodes, i);
                }
            }
            Err(MagnitudeError::PinnedPairMissing { .. })
            | Err(MagnitudeError::PinnedPairMultiple { .. }) => skipped_pins += 1,
            Err(e) => panic!("graph {i}: {e}"),
        }
        if i % 50 == 0 && i > 0 {
            eprintln!(
                "  ... {i}/{} graphs, {total_nodes} nodes, {total_emitted} hits, {:.2?}",
                graphs.len(),
                t1.elapsed()
            );
        }
    }
    println!(
        "k0={k0} total={total}: {} graphs ({} skipped by pins), {} nodes, {} assignments in {:.2?}; worst graph #{} with {} nodes",
        graphs.len(),
        skipped_pins,
        total_nodes,
        total_emitted,
        t1.elapsed(),
        worst.1,
        worst.0
    );
}
