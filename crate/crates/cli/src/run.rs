//! Search orchestration: run directories keyed by config hash, an
//! append-only shard journal for resumption, deterministic merged
//! outputs, and a manifest tying the three together.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{mpsc, Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hamfix_core::diophantine::chern_number_candidates;
use hamfix_core::graphs::DegreeProfile;
use hamfix_core::search::{
    candidate_graphs, run_on_graph, SearchConfig, SearchLog, SurvivorRecord,
};

use crate::{OnOff, SearchArgs};

/// Canonical, hashable description of one search run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SearchSpec {
    dim: usize,
    index: u64,
    chern_table: bool,
    probe_bound: i64,
    profiles: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    tool_version: String,
    config: SearchSpec,
    /// Shard count per profile, fixed by the enumeration order.
    shard_totals: Vec<usize>,
    /// Completed shards per profile as sorted half-open ranges.
    completed: Vec<Vec<[usize; 2]>>,
    /// Digests of the derived output files.
    digests: BTreeMap<String, String>,
}

/// One line of the shard journal.
#[derive(Debug, Serialize, Deserialize)]
struct ShardLine {
    profile: usize,
    shard: usize,
    log: SearchLog,
    survivors: Vec<SurvivorRecord>,
}

pub fn cmd_search(args: &SearchArgs) -> ExitCode {
    let spec = match resolve_spec(args) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut cfgs = Vec::new();
    for counts in &spec.profiles {
        let profile = DegreeProfile::new(counts.clone()).expect("validated in resolve_spec");
        let mut cfg = match SearchConfig::new(profile, spec.index) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        cfg.probe_bound = spec.probe_bound;
        if spec.chern_table && spec.dim == 8 && counts[1] == 1 {
            if let Ok(table) = chern_number_candidates(spec.index, counts[2] as u64) {
                cfg.admissible = Some(table);
            }
        }
        cfgs.push(cfg);
    }

    let out_root = args
        .out
        .clone()
        .or_else(|| std::env::var_os("HAMFIX_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hamfix-runs"));
    let dir = out_root.join(format!("search-{}", config_hash(&spec)));

    let workers = match args.workers {
        Some(0) => {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };

    match execute(&spec, &cfgs, &dir, args.resume, workers) {
        Ok(summary) => {
            print!("{summary}");
            println!("results in {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve_spec(args: &SearchArgs) -> Result<SearchSpec, String> {
    let dim = args.dim;
    if dim == 0 || dim % 2 != 0 || dim > 10 {
        return Err(format!("--dim must be an even number in 2..=10, got {dim}"));
    }
    let n = dim / 2;
    let profiles: Vec<Vec<usize>> = if let Some(betti) = &args.betti {
        if betti.len() != n + 1 {
            return Err(format!(
                "--betti needs {} entries for dimension {dim}, got {}",
                n + 1,
                betti.len()
            ));
        }
        DegreeProfile::new(betti.clone()).map_err(|e| e.to_string())?;
        vec![betti.clone()]
    } else if let Some(chi) = args.fixed_points {
        let found = profiles_with_euler(n, chi);
        if found.is_empty() {
            return Err(format!(
                "no Betti vectors in dimension {dim} have {chi} fixed points"
            ));
        }
        found
    } else {
        return Err("pass --fixed-points or --betti".into());
    };
    Ok(SearchSpec {
        dim,
        index: args.index,
        chern_table: args.chern_table == OnOff::On,
        probe_bound: 12,
        profiles,
    })
}

/// Palindromic unimodal Betti vectors of half-dimension `n` whose entries
/// sum to `chi`, i.e. the manifold shapes with exactly `chi` fixed points.
/// The free entries are b_2 <= b_4 <= ... up to the middle; the rest
/// mirror them.
fn profiles_with_euler(n: usize, chi: u64) -> Vec<Vec<usize>> {
    fn rec(n: usize, chi: u64, slot: usize, min: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot > n / 2 {
            let mut v = vec![1usize; n + 1];
            for (k, &x) in acc.iter().enumerate() {
                v[k + 1] = x;
                v[n - 1 - k] = x;
            }
            if v.iter().map(|&x| x as u64).sum::<u64>() == chi {
                out.push(v);
            }
            return;
        }
        for x in min..=chi as usize {
            acc.push(x);
            rec(n, chi, slot + 1, x, acc, out);
            acc.pop();
        }
    }
    if chi < 2 || chi > 512 {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(n, chi, 1, 1, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

fn config_hash(spec: &SearchSpec) -> String {
    let bytes = serde_json::to_vec(spec).expect("spec serializes");
    let digest = Sha256::digest(&bytes);
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

fn sha_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn compress_ranges(set: &BTreeSet<usize>) -> Vec<[usize; 2]> {
    let mut out: Vec<[usize; 2]> = Vec::new();
    for &i in set {
        match out.last_mut() {
            Some(last) if last[1] == i => last[1] = i + 1,
            _ => out.push([i, i + 1]),
        }
    }
    out
}

fn ranges_cover(ranges: &[[usize; 2]], total: usize) -> bool {
    ranges.len() == 1 && ranges[0] == [0, total] || (total == 0 && ranges.is_empty())
}

fn read_manifest(path: &Path) -> Option<RunManifest> {
    let raw = fs::read_to_string(path).ok()?;
    serde_json::from_str(&raw).ok()
}

fn execute(
    spec: &SearchSpec,
    cfgs: &[SearchConfig],
    dir: &Path,
    resume: bool,
    workers: usize,
) -> Result<String, String> {
    let manifest_path = dir.join("manifest.json");
    let journal_path = dir.join("results.jsonl");

    let manifest = read_manifest(&manifest_path);
    if let Some(m) = &manifest {
        if m.config != *spec {
            return Err(format!(
                "{} holds a different configuration; refusing to mix runs",
                dir.display()
            ));
        }
        // a finished run whose outputs are intact is a no-op
        let complete = m
            .completed
            .iter()
            .zip(&m.shard_totals)
            .all(|(r, &t)| ranges_cover(r, t))
            && m.completed.len() == spec.profiles.len();
        if complete && outputs_intact(dir, &m.digests) {
            let summary = fs::read_to_string(dir.join("summary.txt"))
                .map_err(|e| format!("cannot read summary: {e}"))?;
            return Ok(summary);
        }
    }

    if !resume && journal_path.exists() {
        // starting over: drop the journal and any stale derived files
        fs::remove_file(&journal_path).map_err(|e| e.to_string())?;
        let graph_dir = dir.join("multigraphs");
        if graph_dir.exists() {
            fs::remove_dir_all(&graph_dir).map_err(|e| e.to_string())?;
        }
    }
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;

    // the enumeration fixes shard ids: shard j of profile i is graph j
    let graphs: Vec<_> = cfgs.iter().map(candidate_graphs).collect();
    let shard_totals: Vec<usize> = graphs.iter().map(Vec::len).collect();

    let mut lines = read_journal(&journal_path)?;
    let mut done: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cfgs.len()];
    lines.retain(|l| {
        l.profile < cfgs.len()
            && l.shard < shard_totals[l.profile]
            && done[l.profile].insert(l.shard)
    });

    let pending: Vec<(usize, usize)> = (0..cfgs.len())
        .flat_map(|i| (0..shard_totals[i]).map(move |j| (i, j)))
        .filter(|&(i, j)| !done[i].contains(&j))
        .collect();

    if !pending.is_empty() {
        let queue: Arc<Mutex<VecDeque<(usize, usize)>>> =
            Arc::new(Mutex::new(pending.iter().copied().collect()));
        let shared_cfgs = Arc::new(cfgs.to_vec());
        let shared_graphs = Arc::new(graphs);
        let (tx, rx) = mpsc::channel::<Result<ShardLine, String>>();
        let mut handles = Vec::new();
        for _ in 0..workers.min(pending.len()) {
            let queue = Arc::clone(&queue);
            let cfgs = Arc::clone(&shared_cfgs);
            let graphs = Arc::clone(&shared_graphs);
            let tx = tx.clone();
            handles.push(std::thread::spawn(move || loop {
                let job = queue.lock().unwrap().pop_front();
                let Some((i, j)) = job else { break };
                let msg = run_on_graph(&cfgs[i], &graphs[i][j])
                    .map(|outcome| ShardLine {
                        profile: i,
                        shard: j,
                        log: outcome.log,
                        survivors: outcome.survivors.into_iter().map(|s| s.record).collect(),
                    })
                    .map_err(|e| e.to_string());
                if tx.send(msg).is_err() {
                    break;
                }
            }));
        }
        drop(tx);

        let mut journal = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&journal_path)
            .map_err(|e| e.to_string())?;
        let mut since_flush = 0usize;
        let mut first_error: Option<String> = None;
        for msg in rx {
            match msg {
                Ok(line) => {
                    let row = serde_json::to_string(&line).expect("shard line serializes");
                    writeln!(journal, "{row}").map_err(|e| e.to_string())?;
                    done[line.profile].insert(line.shard);
                    lines.push(line);
                    since_flush += 1;
                    if since_flush >= 256 {
                        journal.flush().map_err(|e| e.to_string())?;
                        write_manifest(&manifest_path, spec, &shard_totals, &done, &BTreeMap::new())?;
                        since_flush = 0;
                    }
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
        journal.flush().map_err(|e| e.to_string())?;
        for h in handles {
            let _ = h.join();
        }
        if let Some(e) = first_error {
            write_manifest(&manifest_path, spec, &shard_totals, &done, &BTreeMap::new())?;
            return Err(e);
        }

        let graphs = Arc::try_unwrap(shared_graphs).map_err(|_| "worker leak".to_string())?;
        drop(graphs);
    }

    // deterministic merge, independent of shard completion order
    let mut log = SearchLog::default();
    let mut records: Vec<SurvivorRecord> = Vec::new();
    for line in &lines {
        log.absorb(&line.log);
        records.extend(line.survivors.iter().cloned());
    }
    records.sort_by(|a, b| a.canonical_key.cmp(&b.canonical_key));
    records.dedup_by(|a, b| a.canonical_key == b.canonical_key);
    log.survivors = records.len();

    let mut digests = BTreeMap::new();
    let survivors_json =
        serde_json::to_string_pretty(&records).expect("records serialize") + "\n";
    write_if_changed(dir, "survivors.json", survivors_json.as_bytes(), &mut digests)?;

    let summary = render_summary(spec, &shard_totals, &log, &records, cfgs);
    write_if_changed(dir, "summary.txt", summary.as_bytes(), &mut digests)?;

    fs::create_dir_all(dir.join("multigraphs")).map_err(|e| e.to_string())?;
    for (k, record) in records.iter().enumerate() {
        let name = format!("multigraphs/family-{k:03}.dot");
        write_if_changed(dir, &name, render_dot(record).as_bytes(), &mut digests)?;
    }

    write_manifest(&manifest_path, spec, &shard_totals, &done, &digests)?;
    Ok(summary)
}

fn outputs_intact(dir: &Path, digests: &BTreeMap<String, String>) -> bool {
    !digests.is_empty()
        && digests.iter().all(|(name, want)| {
            fs::read(dir.join(name)).is_ok_and(|bytes| sha_hex(&bytes) == *want)
        })
}

fn read_journal(path: &Path) -> Result<Vec<ShardLine>, String> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let raw = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for line in raw.lines() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ShardLine>(line) {
            Ok(l) => out.push(l),
            // a torn tail from an interrupted run: recompute those shards
            Err(_) => break,
        }
    }
    Ok(out)
}

fn write_manifest(
    path: &Path,
    spec: &SearchSpec,
    shard_totals: &[usize],
    done: &[BTreeSet<usize>],
    digests: &BTreeMap<String, String>,
) -> Result<(), String> {
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: spec.clone(),
        shard_totals: shard_totals.to_vec(),
        completed: done.iter().map(compress_ranges).collect(),
        digests: digests.clone(),
    };
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(path, body).map_err(|e| e.to_string())
}

fn write_if_changed(
    dir: &Path,
    name: &str,
    bytes: &[u8],
    digests: &mut BTreeMap<String, String>,
) -> Result<(), String> {
    let digest = sha_hex(bytes);
    let path = dir.join(name);
    let unchanged = fs::read(&path).is_ok_and(|old| sha_hex(&old) == digest);
    if !unchanged {
        fs::write(&path, bytes).map_err(|e| format!("cannot write {name}: {e}"))?;
    }
    digests.insert(name.to_string(), digest);
    Ok(())
}

fn render_summary(
    spec: &SearchSpec,
    shard_totals: &[usize],
    log: &SearchLog,
    records: &[SurvivorRecord],
    cfgs: &[SearchConfig],
) -> String {
    let mut s = String::new();
    let push = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    push(
        &mut s,
        format!(
            "search: dim {}, index {}, chern table {}",
            spec.dim,
            spec.index,
            if spec.chern_table { "on" } else { "off" }
        ),
    );
    for (i, counts) in spec.profiles.iter().enumerate() {
        push(
            &mut s,
            format!(
                "profile {:?}: budget {}, {} multigraphs",
                counts,
                cfgs[i].total(),
                shard_totals[i]
            ),
        );
    }
    push(
        &mut s,
        format!(
            "assignments {}, empty cone {}, budget-infeasible {}, pin-infeasible {}",
            log.assignments, log.empty_cone, log.budget_infeasible, log.pin_infeasible
        ),
    );
    for (name, count) in &log.rejections {
        push(&mut s, format!("rejected by {name}: {count}"));
    }
    push(&mut s, format!("{} families", records.len()));
    for (k, r) in records.iter().enumerate() {
        push(&mut s, String::new());
        push(&mut s, format!("family {k}"));
        push(&mut s, format!("  edges: {:?}", r.graph_edges));
        push(&mut s, format!("  magnitudes: {:?}", r.magnitudes));
        push(&mut s, format!("  parameters: {}", r.kernel_basis.len()));
        for vw in &r.weight_table {
            push(
                &mut s,
                format!("  {} (index {}): {}", vw.id, vw.index, vw.weights.join(", ")),
            );
        }
        for cond in &r.filter_report.side_conditions {
            push(&mut s, format!("  require {cond}"));
        }
        if let Some(chern) = &r.filter_report.chern_numbers {
            for (partition, value) in chern {
                let label: Vec<String> = partition.iter().map(usize::to_string).collect();
                push(&mut s, format!("  c[{}] = {}", label.join(","), value));
            }
        }
    }
    s
}

fn render_dot(record: &SurvivorRecord) -> String {
    let mut s = String::from("digraph family {\n  rankdir=BT;\n");
    for (v, index) in record.vertex_indices.iter().enumerate() {
        s.push_str(&format!("  {v} [label=\"p{v} ({index})\"];\n"));
    }
    for (e, (t, h)) in record.graph_edges.iter().enumerate() {
        s.push_str(&format!(
            "  {t} -> {h} [label=\"m={} w={}\"];\n",
            record.magnitudes[e], record.edge_weights[e]
        ));
    }
    s.push_str("}\n");
    s
}
