//! Command-line front end: validation, generic generation, expansion
//! enumeration, and measure computation as reproducible batch steps.
//! Exit codes: 0 success, 1 validation/check failure (witness printed),
//! 2 usage error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;

use semigen::digraph::{ColumnView, RawGraph, SemiDigraph, Vertex};
use semigen::extension::build_generic;
use semigen::instances::all_instances;
use semigen::measure::{
    brute_measure, check_u, check_v, in_u, mc_measure, mu0_cyl, mu0_u, mu0_v, partition_check,
    rebase, Rat, UCylinder, VCylinder,
};
use semigen::star::{check_star, enumerate_expansions, expansion_count, expansion_to_json};

#[derive(Parser)]
#[command(name = "semigen", version, about = "Semigeneric digraph toolkit")]
struct Cli {
    /// Thread count for parallel work (default: rayon's choice)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write JSON output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file for class membership
    Validate {
        file: PathBuf,
        /// Also write a DOT rendering here
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Grow a generic approximation from the empty structure
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        max_demand_size: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate, count, or re-check the admissible expansions
    #[command(group(ArgGroup::new("mode").required(true).args(["enumerate", "count", "check"])))]
    Expand {
        file: PathBuf,
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        count: bool,
        #[arg(long)]
        check: bool,
    },
    /// Measure of a cylinder event, exact or Monte Carlo
    Measure {
        file: PathBuf,
        /// U-part: "v1,v2,...\[;eps=bits\]" with one bit per point pair
        /// in lexicographic (i,j) order; default all 1
        #[arg(long)]
        u: Option<String>,
        /// V-part: tuples "a,b,c;d,e", one per column
        #[arg(long)]
        v: Option<String>,
        /// Monte Carlo with this many samples (default: exact counting)
        #[arg(long, requires = "seed")]
        mc: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the measure-identity oracle suite over all small instances
    Selfcheck {
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_cols: usize,
    },
}

fn log(msg: &str) {
    if std::env::var("SEMIGEN_LOG").map_or(false, |v| !v.is_empty()) {
        eprintln!("semigen: {msg}");
    }
}

fn usage_err(msg: String) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_graph(path: &PathBuf) -> Result<RawGraph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad graph JSON in {}: {e}", path.display()))
}

fn emit(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// "v1,v2;eps=101" -> UCylinder
fn parse_u(s: &str) -> Result<UCylinder, String> {
    let (pts, eps_s) = match s.split_once(';') {
        Some((p, e)) => (p, Some(e)),
        None => (s, None),
    };
    let base_points: Vec<Vertex> = pts
        .split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("bad vertex '{t}': {e}")))
        .collect::<Result<_, _>>()?;
    let n = base_points.len();
    let pair_count = n * n.saturating_sub(1) / 2;
    let bits: Vec<bool> = match eps_s {
        None => vec![true; pair_count],
        Some(e) => {
            let e = e
                .strip_prefix("eps=")
                .ok_or_else(|| format!("expected 'eps=...' after ';' in '{s}'"))?;
            e.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(format!("eps bits must be 0/1, got '{c}'")),
                })
                .collect::<Result<_, _>>()?
        }
    };
    if bits.len() != pair_count {
        return Err(format!(
            "expected {pair_count} eps bits for {n} points, got {}",
            bits.len()
        ));
    }
    let mut eps = BTreeMap::new();
    let mut t = 0;
    for i in 0..n {
        for j in i + 1..n {
            eps.insert((i, j), bits[t]);
            t += 1;
        }
    }
    Ok(UCylinder { base_points, eps })
}

/// "a,b,c;d,e" -> VCylinder
fn parse_v(s: &str) -> Result<VCylinder, String> {
    let tuples = s
        .split(';')
        .map(|t| {
            t.split(',')
                .map(|x| x.trim().parse().map_err(|e| format!("bad vertex '{x}': {e}")))
                .collect::<Result<Vec<Vertex>, String>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(VCylinder { tuples })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return usage_err("--jobs must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let out = cli.out;
    match cli.command {
        Command::Validate { file, dot } => {
            let raw = match load_graph(&file) {
                Ok(r) => r,
                Err(e) => return usage_err(e),
            };
            match SemiDigraph::validate(&raw) {
                Ok(g) => {
                    if let Some(path) = dot {
                        if let Err(e) = std::fs::write(&path, g.to_dot()) {
                            return usage_err(format!("cannot write {}: {e}", path.display()));
                        }
                    }
                    if let Err(e) = emit(&out, &json!({"valid": true})) {
                        return usage_err(e);
                    }
                    ExitCode::SUCCESS
                }
                Err(v) => {
                    emit(&out, &json!({"valid": false, "violation": v.to_string()})).ok();
                    ExitCode::from(1)
                }
            }
        }
        Command::Generate {
            seed,
            steps,
            max_demand_size,
            dot,
        } => {
            log(&format!("generating with seed {seed}, {steps} steps"));
            let (g, report) = build_generic(steps, max_demand_size, seed);
            if let Some(path) = dot {
                if let Err(e) = std::fs::write(&path, g.to_dot()) {
                    return usage_err(format!("cannot write {}: {e}", path.display()));
                }
            }
            let value = json!({
                "graph": g.to_raw(),
                "report": report,
            });
            match emit(&out, &value) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_err(e),
            }
        }
        Command::Expand {
            file,
            enumerate,
            count,
            check,
        } => {
            let raw = match load_graph(&file) {
                Ok(r) => r,
                Err(e) => return usage_err(e),
            };
            let g = match SemiDigraph::validate(&raw) {
                Ok(g) => g,
                Err(v) => {
                    emit(&out, &json!({"valid": false, "violation": v.to_string()})).ok();
                    return ExitCode::from(1);
                }
            };
            let view = ColumnView::new(&g);
            let sizes: Vec<usize> = view.columns().iter().map(|c| c.len()).collect();
            if count {
                let value = json!({"count": expansion_count(&sizes).to_string()});
                return match emit(&out, &value) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_err(e),
                };
            }
            let es = match enumerate_expansions(&g, &view) {
                Ok(es) => es,
                Err(e) => return usage_err(e.to_string()),
            };
            if enumerate {
                let list: Vec<_> = es.iter().map(|e| expansion_to_json(&view, e)).collect();
                let value = serde_json::to_value(list).expect("serializable");
                return match emit(&out, &value) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_err(e),
                };
            }
            debug_assert!(check);
            for e in &es {
                if let Err(v) = check_star(&g, &view, &e.order_vec(), &e.r_set(&g, &view)) {
                    emit(&out, &json!({"ok": false, "violation": format!("{v:?}")})).ok();
                    return ExitCode::from(1);
                }
            }
            let formula = expansion_count(&sizes);
            let ok = es.len() as u128 == formula;
            let value = json!({
                "ok": ok,
                "checked": es.len(),
                "formula": formula.to_string(),
            });
            emit(&out, &value).ok();
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Measure {
            file,
            u,
            v,
            mc,
            seed,
        } => {
            let raw = match load_graph(&file) {
                Ok(r) => r,
                Err(e) => return usage_err(e),
            };
            let g = match SemiDigraph::validate(&raw) {
                Ok(g) => g,
                Err(viol) => {
                    emit(&out, &json!({"valid": false, "violation": viol.to_string()})).ok();
                    return ExitCode::from(1);
                }
            };
            let u = match u.as_deref().map(parse_u).transpose() {
                Ok(u) => u,
                Err(e) => return usage_err(e),
            };
            let v = match v.as_deref().map(parse_v).transpose() {
                Ok(v) => v,
                Err(e) => return usage_err(e),
            };
            if let Err(e) = u.as_ref().map_or(Ok(()), |u| check_u(&g, u)) {
                return usage_err(e.to_string());
            }
            if let Err(e) = v.as_ref().map_or(Ok(()), |v| check_v(&g, v)) {
                return usage_err(e.to_string());
            }
            let value = match mc {
                None => match brute_measure(&g, u.as_ref(), v.as_ref()) {
                    Ok(r) => json!({"exact": rat_str(&r)}),
                    Err(e) => return usage_err(e.to_string()),
                },
                Some(n) => {
                    if n == 0 {
                        return usage_err("--mc needs a positive sample count".into());
                    }
                    let seed = seed.expect("clap enforces --seed with --mc");
                    log(&format!("monte carlo: {n} samples, seed {seed}"));
                    match mc_measure(&g, u.as_ref(), v.as_ref(), n, seed) {
                        Ok((p, (lo, hi))) => json!({"estimate": p, "ci": [lo, hi], "n": n}),
                        Err(e) => return usage_err(e.to_string()),
                    }
                }
            };
            match emit(&out, &value) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_err(e),
            }
        }
        Command::Selfcheck {
            max_vertices,
            max_cols,
        } => {
            if max_vertices > 7 || max_cols > 4 {
                return usage_err("selfcheck sweep is limited to 7 vertices / 4 columns".into());
            }
            let results = selfcheck(max_vertices, max_cols);
            let all_ok = results.iter().all(|(_, ok)| *ok);
            let value = json!({
                "identities": results
                    .iter()
                    .map(|(name, ok)| json!({"identity": name, "pass": ok}))
                    .collect::<Vec<_>>(),
                "pass": all_ok,
            });
            emit(&out, &value).ok();
            for (name, ok) in &results {
                eprintln!("{}: {}", name, if *ok { "pass" } else { "FAIL" });
            }
            if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// The measure module's identity suite over every small instance.
fn selfcheck(max_vertices: usize, max_cols: usize) -> Vec<(&'static str, bool)> {
    let instances = all_instances(max_cols, max_vertices);
    log(&format!("selfcheck over {} instances", instances.len()));
    let mut prop1 = true;
    let mut prop2 = true;
    let mut product = true;
    let mut partition = true;
    let mut rebase_ok = true;
    for g in &instances {
        let view = ColumnView::new(g);
        let reps: Vec<Vertex> = view.columns().iter().map(|c| c[0]).collect();
        let es = enumerate_expansions(g, &view).unwrap();
        // exact fraction of cached expansions inside the event
        let frac = |u: Option<&UCylinder>, v: Option<&VCylinder>| -> Rat {
            let hits = es
                .iter()
                .filter(|e| semigen::measure::cyl_contains(g, &view, u, v, e))
                .count();
            Rat::new(hits.into(), es.len().into())
        };
        // Proposition 1: U over column representatives
        for n in 1..=reps.len().min(3) {
            let u = UCylinder::agreeing(reps[..n].to_vec());
            if frac(Some(&u), None) != mu0_u(n) {
                prop1 = false;
            }
        }
        // Proposition 2: V over the full columns
        for c in view.columns() {
            let v = VCylinder {
                tuples: vec![c.clone()],
            };
            if frac(None, Some(&v)) != mu0_v(&[c.len()]) {
                prop2 = false;
            }
        }
        // product identity: U on two columns, V on a third
        if view.len() >= 3 {
            let u = UCylinder::agreeing(reps[..2].to_vec());
            let v = VCylinder {
                tuples: vec![view.columns()[2].clone()],
            };
            let lhs = frac(Some(&u), Some(&v));
            let rhs = frac(Some(&u), None) * frac(None, Some(&v));
            if lhs != rhs || lhs != mu0_cyl(g, Some(&u), Some(&v)).unwrap() {
                product = false;
            }
        }
        // partition over up to 3 representatives
        for n in 1..=reps.len().min(3) {
            if !partition_check(g, &reps[..n]).unwrap() {
                partition = false;
            }
        }
        // rebase: replace each base point by every column-mate
        if view.len() >= 2 {
            let u = UCylinder::agreeing(reps[..2].to_vec());
            for pos in 0..2 {
                for &w in &view.columns()[pos] {
                    let r = rebase(g, &u, &[(reps[pos], w)]).unwrap();
                    if es
                        .iter()
                        .any(|e| in_u(g, &view, &u, e) != in_u(g, &view, &r, e))
                    {
                        rebase_ok = false;
                    }
                }
            }
        }
    }
    vec![
        ("proposition-1-counting", prop1),
        ("proposition-2-counting", prop2),
        ("product-identity", product),
        ("partition-identity", partition),
        ("rebase-extensionality", rebase_ok),
    ]
}
