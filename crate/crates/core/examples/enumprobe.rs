use hamfix_core::graphs::{enumerate_multigraphs_acyclic, DegreeProfile};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let counts: Vec<usize> = args[1].split(',').map(|s| s.parse().unwrap()).collect();
    let p = DegreeProfile::new(counts.clone()).unwrap();
    let t = Instant::now();
    let graphs = enumerate_multigraphs_acyclic(&p);
    println!("{:?}: {} acyclic classes in {:.2?}", counts, graphs.len(), t.elapsed());
}
