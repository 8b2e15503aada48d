use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ghcut_core::approx::approx_gh_tree;
use ghcut_core::error::Error;
use ghcut_core::expander::{boundary_linked, certify_cluster, expander_decompose, trim_boundary_linked, Certificate};
use ghcut_core::gen;
use ghcut_core::ghtree::{component_jobs, gh_tree, ComponentJob, ComponentTree};
use ghcut_core::graph::{DemandVector, Graph, TerminalSet};
use ghcut_core::io::{parse_graph, parse_terminals, parse_tree, write_forest};
use ghcut_core::metrics::{Metrics, MetricsRecord};
use ghcut_core::oracles::{brute_force_mincut, classic_gomory_hu};
use ghcut_core::params::Params;
use ghcut_core::ratio::Ratio;
use ghcut_core::tree::{verify_gh_tree, SteinerGHTree, TreeEdge, VerifyReport};
use rayon::prelude::*;

use crate::{BenchArgs, EdArgs, Family, ProfileArg, RunArgs, TreeArgs, VerifyArgs, VerifyMode};

/// Input problems map to 2, anything else that fails to 3.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse { .. } | Error::InvalidArgument(_) => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    3
}

fn params(run: &RunArgs) -> Params {
    match run.profile {
        ProfileArg::Full => Params::full(),
        ProfileArg::Desk => Params::desk(),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(input: &Path, terminals: Option<&Path>) -> Result<(Graph, TerminalSet)> {
    let (g, from_file) = parse_graph(&read(input)?).with_context(|| format!("parsing {}", input.display()))?;
    let u = match terminals {
        Some(p) => parse_terminals(&read(p)?, g.n()).with_context(|| format!("parsing {}", p.display()))?,
        None => from_file.unwrap_or_else(|| TerminalSet::all(g.n())),
    };
    Ok((g, u))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn record(path: Option<&Path>, rec: &MetricsRecord) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path).with_context(|| format!("opening {}", path.display()))?;
    writeln!(f, "{}", serde_json::to_string(rec)?)?;
    Ok(())
}

/// Checks `t` on one connected instance. Oracle flows are counted in
/// `metrics.oracle_calls` only.
fn check_tree(
    metrics: &mut Metrics,
    g: &Graph,
    u: &TerminalSet,
    t: &SteinerGHTree,
    eps: Ratio,
    mode: VerifyMode,
    sample: Option<(usize, u64)>,
) -> Result<VerifyReport> {
    Ok(match mode {
        VerifyMode::Off => VerifyReport::default(),
        VerifyMode::Oracle => {
            let classic = classic_gomory_hu(metrics, g, u)?;
            verify_gh_tree(g, u, t, eps, &mut |s, x| classic.path_min(s, x), sample)?
        }
        VerifyMode::Brute => {
            let mut lam = |s, x| brute_force_mincut(metrics, g, s, x).map(|r| r.0);
            verify_gh_tree(g, u, t, eps, &mut lam, sample)?
        }
    })
}

fn summarize(reports: &[VerifyReport]) -> bool {
    let pairs: usize = reports.iter().map(|r| r.pairs_checked).sum();
    let mut ok = true;
    for r in reports {
        for s in &r.structural {
            eprintln!("structural: {s}");
        }
        for v in r.violations.iter().take(10) {
            eprintln!("violation: lambda({}, {}) = {}, tree gives {}", v.s + 1, v.t + 1, v.lambda, v.tree_value);
        }
        ok &= r.passed();
    }
    let bad: usize = reports.iter().map(|r| r.violations.len() + r.structural.len()).sum();
    eprintln!("verify: {pairs} pairs checked, {bad} problems");
    ok
}

struct Built {
    component: ComponentTree,
    metrics: Metrics,
    report: Option<VerifyReport>,
}

fn build(job: ComponentJob, p: &Params, eps: Option<Ratio>, a: &TreeArgs) -> Result<Built> {
    let mut metrics = Metrics::new();
    if job.terminals.is_empty() {
        return Ok(Built { component: job.lift(None)?, metrics, report: None });
    }
    let t = match eps {
        None => gh_tree(&mut metrics, p, &job.graph, &job.terminals)?,
        Some(e) => approx_gh_tree(&mut metrics, p, &job.graph, &job.terminals, e)?,
    };
    let report = if a.verify == VerifyMode::Off {
        None
    } else {
        let mut vm = Metrics::new();
        let sample = a.sample.map(|k| (k, a.seed));
        let r = check_tree(&mut vm, &job.graph, &job.terminals, &t, eps.unwrap_or(Ratio::zero()), a.verify, sample)?;
        metrics.oracle_calls += vm.oracle_calls;
        Some(r)
    };
    Ok(Built { component: job.lift(Some(t))?, metrics, report })
}

/// `tree` and `approx`.
pub fn tree(a: &TreeArgs, eps: Option<Ratio>) -> Result<bool> {
    let start = Instant::now();
    let (g, u) = load(&a.input, a.terminals.as_deref())?;
    if let Some(e) = eps {
        if e.is_zero() || e > Ratio::one() {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1], got {e}")).into());
        }
    }
    let p = params(&a.run);
    let jobs = component_jobs(&g, &u)?;
    let built: Vec<Result<Built>> = pool(a.run.threads)?.install(|| jobs.into_par_iter().map(|j| build(j, &p, eps, a)).collect());
    let mut metrics = Metrics::new();
    let mut forest = Vec::new();
    let mut reports = Vec::new();
    for b in built {
        let b = b?;
        metrics.merge(&b.metrics);
        forest.push(b.component);
        reports.extend(b.report);
    }
    emit(a.output.as_deref(), &write_forest(&forest, g.n()))?;
    let ok = a.verify == VerifyMode::Off || summarize(&reports);
    let name = if eps.is_some() { "approx" } else { "tree" };
    record(a.run.metrics.as_deref(), &MetricsRecord::new(name, g.n(), g.m(), &metrics, start.elapsed().as_millis() as u64))?;
    Ok(ok)
}

fn demand(arg: &str, g: &Graph) -> Result<DemandVector> {
    match arg {
        "degree" => Ok(DemandVector::degrees(g)),
        "uniform" => Ok(DemandVector::uniform(g.n())),
        path => {
            let text = read(Path::new(path))?;
            let mut d = vec![0; g.n()];
            for (i, line) in text.lines().enumerate() {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
                match toks.as_slice() {
                    [] | ["c", ..] => {}
                    ["d", v, x] => {
                        let v: usize = v.parse().map_err(|_| bad("bad vertex"))?;
                        if v == 0 || v > g.n() {
                            return Err(bad("vertex out of range").into());
                        }
                        d[v - 1] = x.parse().map_err(|_| bad("bad demand"))?;
                    }
                    _ => return Err(bad("expected 'd <vertex> <value>'").into()),
                }
            }
            Ok(DemandVector::new(d)?)
        }
    }
}

fn certificate_name(c: Certificate) -> &'static str {
    match c {
        Certificate::Vacuous => "vacuous",
        Certificate::Exhaustive => "exhaustive",
        Certificate::Flow => "flow",
        Certificate::Connected => "connected",
    }
}

/// `ed`.
pub fn ed(a: &EdArgs) -> Result<bool> {
    let start = Instant::now();
    let (g, _) = load(&a.input, None)?;
    let d = demand(&a.demand, &g)?;
    let p = params(&a.run);
    let mut metrics = Metrics::new();
    let mut dec = expander_decompose(&mut metrics, &p, &g, &d, a.phi)?;
    if a.trim {
        dec = trim_boundary_linked(&mut metrics, &p, &g, &dec, &d, a.phi)?;
    }
    let mut s = String::new();
    let _ = writeln!(s, "p ed {} {} {} {}", g.n(), dec.clusters.len(), dec.intercluster_weight, dec.q_factor);
    for (c, cert) in dec.clusters.iter().zip(&dec.certificates) {
        let verts: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(s, "k {} {}", certificate_name(*cert), verts.join(" "));
    }
    if a.trim {
        for &i in &dec.unlinked {
            let _ = writeln!(s, "u {}", i + 1);
        }
    }
    emit(a.output.as_deref(), &s)?;
    let mut ok = true;
    if a.check {
        let mut bad = 0;
        for (i, c) in dec.clusters.iter().enumerate() {
            let cert = certify_cluster(&p, &g, c, &d, a.phi);
            if !cert.expander {
                eprintln!("cluster {} not certified{}", i + 1, if cert.exact { "" } else { " (inconclusive)" });
                bad += 1;
            }
            if a.trim && !dec.unlinked.contains(&i) && !boundary_linked(&mut Metrics::new(), &g, c, &d, a.phi, dec.q_factor)? {
                eprintln!("cluster {} is not boundary-linked", i + 1);
                bad += 1;
            }
        }
        let bound = dec.q_factor as u128 * a.phi.numer() * d.total() as u128;
        if dec.intercluster_weight as u128 * a.phi.denom() > bound {
            eprintln!("intercluster weight {} exceeds q phi d(V)", dec.intercluster_weight);
            bad += 1;
        }
        eprintln!("check: {} clusters, {bad} problems", dec.clusters.len());
        ok = bad == 0;
    }
    record(a.run.metrics.as_deref(), &MetricsRecord::new("ed", g.n(), g.m(), &metrics, start.elapsed().as_millis() as u64))?;
    Ok(ok)
}

/// A component tree from a file in the job's local ids.
fn localize(job: &ComponentJob, c: &ComponentTree) -> Result<SteinerGHTree> {
    let t = c.tree.as_ref().expect("caller checks");
    let local = |x: usize| job.vertices.binary_search(&x).expect("split keeps components");
    let nodes = t.nodes().iter().map(|&x| local(x)).collect();
    let edges = t.edges().iter().map(|e| TreeEdge { a: local(e.a), b: local(e.b), w: e.w }).collect();
    let f = t.assignment().iter().map(|&x| local(x)).collect();
    Ok(SteinerGHTree::new(nodes, edges, f)?)
}

/// `verify`.
pub fn verify(a: &VerifyArgs) -> Result<bool> {
    let (g, u) = load(&a.graph, a.terminals.as_deref())?;
    let file = parse_tree(&read(&a.tree)?, g.n()).with_context(|| format!("parsing {}", a.tree.display()))?;
    let jobs = component_jobs(&g, &u)?;
    let expected = (jobs.len() > 1).then_some(jobs.len());
    if file.components != expected {
        eprintln!("component marker {:?} does not match the graph ({:?})", file.components, expected);
        return Ok(false);
    }
    let comps = file.split(&g)?;
    let mut metrics = Metrics::new();
    let mut reports = Vec::new();
    for (job, c) in jobs.iter().zip(&comps) {
        match (&c.tree, job.terminals.is_empty()) {
            (None, true) => {}
            (None, false) => bail!(Error::InvalidArgument(format!("no tree for the component of vertex {}", job.vertices[0] + 1))),
            (Some(_), _) => {
                let t = localize(job, c)?;
                let sample = a.sample.map(|k| (k, a.seed));
                reports.push(check_tree(&mut metrics, &job.graph, &job.terminals, &t, a.epsilon, a.mode, sample)?);
            }
        }
    }
    Ok(a.mode == VerifyMode::Off || summarize(&reports))
}

fn family_graph(f: Family, n: usize, max_w: u64, seed: u64) -> Graph {
    match f {
        Family::Random => gen::random_connected(n, 4 * n, max_w, seed),
        Family::Bridged => gen::bridged_cliques((n / 6).max(1), 6, seed),
        Family::Expander => gen::random_expander(n, 6, seed),
        Family::Tree => gen::random_tree(n, max_w, seed),
    }
}

/// Header of the `bench` table.
pub const BENCH_COLUMNS: [&str; 10] =
    ["family", "n", "m", "maxflow_calls", "maxflow_edges", "ed_calls", "ed_edges", "depth", "edges_per_m", "wall_ms"];

/// `bench`.
pub fn bench(a: &BenchArgs) -> Result<bool> {
    let p = params(&a.run);
    let family = format!("{:?}", a.family).to_lowercase();
    let rows: Vec<Result<MetricsRecord>> = pool(a.run.threads)?.install(|| {
        a.sizes
            .par_iter()
            .map(|&n| {
                let start = Instant::now();
                let g = family_graph(a.family, n, if a.epsilon.is_some() { 100 } else { 1 }, a.seed);
                let u = TerminalSet::all(g.n());
                let mut m = Metrics::new();
                match a.epsilon {
                    None => gh_tree(&mut m, &p, &g, &u)?,
                    Some(e) => approx_gh_tree(&mut m, &p, &g, &u, e)?,
                };
                Ok(MetricsRecord::new("bench", g.n(), g.m(), &m, start.elapsed().as_millis() as u64))
            })
            .collect()
    });
    let mut out = BENCH_COLUMNS.join("\t") + "\n";
    for r in rows {
        let r = r?;
        let c = &r.counters;
        let _ = writeln!(
            out,
            "{family}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}",
            r.n, r.m, c.maxflow_calls, c.maxflow_edges, c.ed_calls, c.ed_edges, c.recursion_depth, r.instance_edges_per_m, r.wall_ms
        );
        record(a.run.metrics.as_deref(), &r)?;
    }
    print!("{out}");
    Ok(true)
}
