use std::time::Instant;

use hamfix_core::diophantine::chern_number_candidates;
use hamfix_core::graphs::DegreeProfile;
use hamfix_core::search::{plan_shards, run_search, SearchConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("4");

    let (counts, k0): (Vec<usize>, u64) = match which {
        "1" => (vec![1, 1, 2, 1, 1], 1),
        "2" => (vec![1, 1, 2, 1, 1], 2),
        "3" => (vec![1, 1, 2, 1, 1], 3),
        "4" => (vec![1, 1, 2, 1, 1], 4),
        "5" => (vec![1, 1, 2, 1, 1], 5),
        "2b3" => (vec![1, 1, 3, 1, 1], 2),
        "2b4" => (vec![1, 1, 4, 1, 1], 2),
        "2b5" => (vec![1, 1, 5, 1, 1], 2),
        "2b6" => (vec![1, 1, 6, 1, 1], 2),
        "3t" => (vec![1, 2, 3, 2, 1], 3),
        other => panic!("unknown case {other}"),
    };
    let profile = DegreeProfile::new(counts.clone()).unwrap();
    let mut cfg = SearchConfig::new(profile, k0).unwrap();
    if counts.len() == 5 && counts[1] == 1 {
        if let Ok(table) = chern_number_candidates(k0, counts[2] as u64) {
            cfg.admissible = Some(table);
        }
    }
    let t0 = Instant::now();
    let shards = plan_shards(&cfg);
    println!(
        "case {which}: profile {counts:?} k0={k0} total={} graphs={} (plan {:?})",
        cfg.total(),
        shards.len(),
        t0.elapsed()
    );
    let t1 = Instant::now();
    let outcome = run_search(&cfg).unwrap();
    println!("run {:?}", t1.elapsed());
    println!("log: {:#?}", outcome.log);
    for s in &outcome.survivors {
        println!("---- survivor ----");
        println!("edges: {:?}", s.record.graph_edges);
        println!("m: {:?}", s.record.magnitudes);
        println!("kernel: {:?}", s.record.kernel_basis);
        println!("weights:");
        for vw in &s.record.weight_table {
            println!("  {} (index {}): {:?}", vw.id, vw.index, vw.weights);
        }
        if let Some(cn) = &s.record.filter_report.chern_numbers {
            println!("chern: {cn:?}");
        }
        println!("side conditions: {:?}", s.record.filter_report.side_conditions);
        println!("satisfying points: {}", s.record.filter_report.satisfying_points);
    }
}
