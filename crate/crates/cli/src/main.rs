mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use twcut::component::{solve_with, ProblemSpec, SolveOptions};
use twcut::decomposition::{
    decompose_min_fill, make_nice, parse_td, write_td, NiceDecomposition, TreeDecomposition,
};
use twcut::driver::RunOptions;
use twcut::general::{
    find_member, gen_solve, parse_family, preset, ForbiddenFamily, GenOptions, Mode,
};
use twcut::graph::{
    component_bound_holds, delete_edges, edge_set_to_edge_list, max_component_metric,
    parse_edge_costs, parse_edge_set, parse_graph, parse_vertex_values, to_edge_list, Graph,
    VertexAnnotations,
};
use twcut::oracle::gen_random_low_tw;

use report::{
    named_edges, BenchReport, BenchRow, Instance, Problem, RunReport, States, Timing, SCHEMA,
};

/// Exact minimum edge deletion over tree decompositions.
#[derive(Parser)]
#[command(name = "twcut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Delete edges so every component has at most h vertices (or weight).
    SolveComponents(ComponentArgs),
    /// Delete edges so no member of a forbidden family remains.
    SolveFamily(FamilyArgs),
    /// Compute a tree decomposition and write it in .td format.
    Decompose(DecomposeArgs),
    /// Check a deletion set against a component bound or a family.
    Verify(VerifyArgs),
    /// Solve a suite of instances and tabulate the results.
    Bench(BenchArgs),
    /// Write a random partial k-tree as an edge list.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct Common {
    /// Graph file (edge list or .gr).
    #[arg(long)]
    graph: PathBuf,
    /// Deletion budget; defaults to the number of edges.
    #[arg(long)]
    k: Option<u64>,
    /// Tree decomposition in .td format instead of the min-fill heuristic.
    #[arg(long)]
    td: Option<PathBuf>,
    /// `u v cost` lines; unlisted edges cost 1.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Report an optimal deletion set.
    #[arg(long)]
    witness: bool,
    /// Also write the deletion set as an edge list to this file.
    #[arg(long, value_name = "FILE")]
    witness_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Evaluate independent subtrees concurrently.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct ComponentArgs {
    #[command(flatten)]
    common: Common,
    /// Largest allowed component size (or weight).
    #[arg(long)]
    h: u64,
    /// `vertex weight` lines covering every vertex.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// `vertex limit` lines; unlisted vertices are unrestricted.
    #[arg(long)]
    limits: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    #[command(flatten)]
    common: Common,
    /// Family file or preset such as `@trees 4`, `@clique 3`, `@star 4`, `@path 4`.
    #[arg(long)]
    family: String,
    /// Forbid induced copies instead of subgraphs.
    #[arg(long)]
    induced: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Also build a nice decomposition and report node statistics.
    #[arg(long)]
    nice: bool,
    /// Write the .td here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Edge list of the edges to delete.
    #[arg(long)]
    delete: PathBuf,
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    h: Option<u64>,
    #[arg(long, requires = "h")]
    weights: Option<PathBuf>,
    #[arg(long, requires = "h")]
    limits: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, requires = "family")]
    induced: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Lines of `path [h=N] [k=N] [td=path]`, relative to the suite file.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    suite: Option<PathBuf>,
    /// Random partial k-trees: `n,width,count,seed`.
    #[arg(long)]
    random: Option<String>,
    #[arg(long, default_value_t = 5)]
    h: u64,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the construction decomposition here.
    #[arg(long)]
    td_out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn run_options(parallel: bool) -> Result<RunOptions> {
    let state_cap = match std::env::var("TWCUT_STATE_CAP") {
        Ok(v) => Some(
            v.trim()
                .parse()
                .with_context(|| format!("TWCUT_STATE_CAP=`{v}` is not a count"))?,
        ),
        Err(_) => None,
    };
    Ok(RunOptions {
        parallel,
        state_cap,
        keep_tables: false,
    })
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

struct Prepared {
    nd: NiceDecomposition,
    instance: Instance,
    decompose_ms: f64,
}

fn prepare(
    g: &Graph,
    td: Option<&Path>,
    source: Option<&str>,
    given: Option<TreeDecomposition>,
) -> Result<Prepared> {
    let start = Instant::now();
    let (td, src) = match (td, given) {
        (Some(path), _) => (
            parse_td(&read(path)?, g).with_context(|| format!("in {}", path.display()))?,
            "file",
        ),
        (None, Some(td)) => (td, source.unwrap_or("generated")),
        (None, None) => (decompose_min_fill(g), "min-fill"),
    };
    let nd = make_nice(&td, g)?;
    let instance = Instance {
        n: g.n(),
        e: g.m(),
        width: nd.width(),
        decomposition: src.into(),
        nice_nodes: nd.len(),
    };
    Ok(Prepared {
        nd,
        instance,
        decompose_ms: millis(start),
    })
}

fn load_family(spec: &str, induced: bool) -> Result<ForbiddenFamily> {
    let fam = if spec.trim_start().starts_with('@') {
        ForbiddenFamily::new(preset(spec)?, Mode::Subgraph)?
    } else {
        parse_family(&read(Path::new(spec))?).with_context(|| format!("in {spec}"))?
    };
    Ok(if induced {
        ForbiddenFamily::new(fam.members().to_vec(), Mode::Induced)?
    } else {
        fam
    })
}

fn emit(report: &RunReport, json: bool) -> Result<ExitCode> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        print!("{}", report.human());
    }
    Ok(if report.feasible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn finish_witness(
    g: &Graph,
    common: &Common,
    witness: Option<&twcut::graph::EdgeSet>,
) -> Result<Option<Vec<[String; 2]>>> {
    let Some(w) = witness else { return Ok(None) };
    if let Some(path) = &common.witness_out {
        write(path, &edge_set_to_edge_list(g, w))?;
    }
    Ok(common.witness.then(|| named_edges(g, w)))
}

fn solve_components(a: &ComponentArgs) -> Result<ExitCode> {
    let start = Instant::now();
    let c = &a.common;
    let g = load_graph(&c.graph)?;
    let mut ann = VertexAnnotations::default();
    if let Some(p) = &a.weights {
        ann.weights = Some(parse_vertex_values(&g, &read(p)?, true, 1)?);
    }
    if let Some(p) = &a.limits {
        ann.limits = Some(parse_vertex_values(&g, &read(p)?, false, u64::MAX)?);
    }
    if let Some(p) = &c.costs {
        ann.edge_costs = Some(parse_edge_costs(&g, &read(p)?)?);
    }
    let k = c.k.unwrap_or(g.m() as u64);
    let problem = Problem {
        h: Some(a.h),
        k,
        family: None,
        mode: None,
        weights: ann.weights.is_some(),
        limits: ann.limits.is_some(),
        costs: ann.edge_costs.is_some(),
    };
    let prep = prepare(&g, c.td.as_deref(), None, None)?;
    let solve_start = Instant::now();
    let spec = ProblemSpec::new(a.h, k).with_annotations(ann);
    let want = c.witness || c.witness_out.is_some();
    let sol = solve_with(
        &g,
        &prep.nd,
        &spec,
        &SolveOptions {
            witness: want,
            run: run_options(c.parallel)?,
        },
    )?;
    let solve_ms = millis(solve_start);
    let witness = finish_witness(&g, c, sol.witness.as_ref())?;
    let report = RunReport {
        schema: SCHEMA,
        command: "solve-components".into(),
        instance: prep.instance,
        problem,
        optimum: sol.optimum,
        feasible: sol.feasible,
        witness,
        time_ms: Timing {
            decompose_ms: prep.decompose_ms,
            solve_ms,
            total_ms: millis(start),
        },
        states: States::from(&sol.stats),
    };
    emit(&report, c.json)
}

fn solve_family(a: &FamilyArgs) -> Result<ExitCode> {
    let start = Instant::now();
    let c = &a.common;
    let g = load_graph(&c.graph)?;
    let family = load_family(&a.family, a.induced)?;
    let costs = match &c.costs {
        Some(p) => Some(parse_edge_costs(&g, &read(p)?)?),
        None => None,
    };
    let k = c.k.unwrap_or(g.m() as u64);
    let problem = Problem {
        h: None,
        k,
        family: Some(a.family.clone()),
        mode: Some(match family.mode() {
            Mode::Subgraph => "subgraph".into(),
            Mode::Induced => "induced".into(),
        }),
        weights: false,
        limits: false,
        costs: costs.is_some(),
    };
    let prep = prepare(&g, c.td.as_deref(), None, None)?;
    let solve_start = Instant::now();
    let opts = GenOptions {
        witness: c.witness || c.witness_out.is_some(),
        edge_costs: costs,
        run: run_options(c.parallel)?,
        ..Default::default()
    };
    let sol = gen_solve(&g, &prep.nd, &family, k, &opts)?;
    let solve_ms = millis(solve_start);
    let witness = finish_witness(&g, c, sol.witness.as_ref())?;
    let report = RunReport {
        schema: SCHEMA,
        command: "solve-family".into(),
        instance: prep.instance,
        problem,
        optimum: sol.optimum,
        feasible: sol.feasible,
        witness,
        time_ms: Timing {
            decompose_ms: prep.decompose_ms,
            solve_ms,
            total_ms: millis(start),
        },
        states: States::from(&sol.stats),
    };
    emit(&report, c.json)
}

fn decompose(a: &DecomposeArgs) -> Result<ExitCode> {
    let g = load_graph(&a.graph)?;
    let start = Instant::now();
    let td = decompose_min_fill(&g);
    let text = write_td(&td, g.n());
    let ms = millis(start);
    let nice = if a.nice {
        let nd = make_nice(&td, &g)?;
        let bound = 4 * g.n().max(1);
        if nd.len() > bound {
            bail!(
                "nice decomposition has {} nodes, above the bound {bound}",
                nd.len()
            );
        }
        Some(nd.kind_counts())
    } else {
        None
    };
    if let Some(path) = &a.out {
        write(path, &text)?;
    }
    if a.json {
        let mut v = serde_json::json!({
            "schema": SCHEMA,
            "n": g.n(),
            "e": g.m(),
            "width": td.width(),
            "bags": td.len(),
            "time_ms": ms,
        });
        if a.out.is_none() {
            v["td"] = text.clone().into();
        }
        if let Some([leaf, introduce, forget, join]) = nice {
            v["nice"] = serde_json::json!({
                "nodes": leaf + introduce + forget + join,
                "leaf": leaf, "introduce": introduce, "forget": forget, "join": join,
                "bound": 4 * g.n().max(1),
            });
        }
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        if a.out.is_none() {
            print!("{text}");
        }
        eprintln!("width {} ({} bags, {:.1} ms)", td.width(), td.len(), ms);
        if let Some([leaf, introduce, forget, join]) = nice {
            eprintln!(
                "nice: {} nodes (leaf {leaf}, introduce {introduce}, forget {forget}, join {join}), bound {}",
                leaf + introduce + forget + join,
                4 * g.n().max(1)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let g = load_graph(&a.graph)?;
    let deleted = parse_edge_set(&g, &read(&a.delete)?)?;
    let after = delete_edges(&g, &deleted)?;
    let mut v = serde_json::json!({ "schema": SCHEMA, "deleted": deleted.len() });
    let pass = if let Some(h) = a.h {
        let mut ann = VertexAnnotations::default();
        if let Some(p) = &a.weights {
            ann.weights = Some(parse_vertex_values(&g, &read(p)?, true, 1)?);
        }
        if let Some(p) = &a.limits {
            ann.limits = Some(parse_vertex_values(&g, &read(p)?, false, u64::MAX)?);
        }
        let metric = max_component_metric(&after, ann.weights.as_deref())?;
        let pass = component_bound_holds(&after, h, &ann);
        v["h"] = h.into();
        v["max_component"] = metric.into();
        if !a.json {
            println!(
                "deleted {} edges; largest component {metric} (bound {h})",
                deleted.len()
            );
        }
        pass
    } else {
        let spec = a.family.as_deref().expect("clap requires --h or --family");
        let family = load_family(spec, a.induced)?;
        let hit = find_member(&after, &family);
        v["family"] = spec.into();
        v["contains_member"] = hit.is_some().into();
        if !a.json {
            match &hit {
                Some(o) => {
                    let names: Vec<&str> = o.map.iter().map(|&x| after.name(x)).collect();
                    println!(
                        "deleted {} edges; member {} remains on {}",
                        deleted.len(),
                        o.member,
                        names.join(" ")
                    );
                }
                None => println!("deleted {} edges; no member remains", deleted.len()),
            }
        }
        hit.is_none()
    };
    v["pass"] = pass.into();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

type Loader = Box<dyn Fn() -> Result<(Graph, Option<TreeDecomposition>, &'static str)>>;

struct BenchItem {
    name: String,
    h: u64,
    k: Option<u64>,
    load: Loader,
}

fn parse_random(spec: &str) -> Result<[u64; 4]> {
    let parts: Vec<u64> = spec
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("--random `{spec}` must be n,width,count,seed"))?;
    let [n, w, count, seed] = parts[..] else {
        bail!("--random `{spec}` must be n,width,count,seed")
    };
    if w == 0 {
        bail!("--random width must be at least 1");
    }
    Ok([n, w, count, seed])
}

fn bench_items(a: &BenchArgs) -> Result<Vec<BenchItem>> {
    let mut items = Vec::new();
    if let Some(spec) = &a.random {
        let [n, w, count, seed] = parse_random(spec)?;
        for i in 0..count {
            let s = seed + i;
            items.push(BenchItem {
                name: format!("random-{n}-{w}-{s}"),
                h: a.h,
                k: a.k,
                load: Box::new(move || {
                    let (g, td) = gen_random_low_tw(n as usize, w as usize, s);
                    Ok((g, Some(td), "generated"))
                }),
            });
        }
    }
    if let Some(path) = &a.suite {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for (i, raw) in read(path)?.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let file = base.join(tok.next().expect("non-empty line"));
            let (mut h, mut k, mut td) = (a.h, a.k, None);
            for t in tok {
                let (key, val) = t
                    .split_once('=')
                    .with_context(|| format!("suite line {}: bad token `{t}`", i + 1))?;
                match key {
                    "h" => {
                        h = val
                            .parse()
                            .with_context(|| format!("suite line {}: bad h", i + 1))?
                    }
                    "k" => {
                        k = Some(
                            val.parse()
                                .with_context(|| format!("suite line {}: bad k", i + 1))?,
                        )
                    }
                    "td" => td = Some(base.join(val)),
                    _ => bail!("suite line {}: unknown key `{key}`", i + 1),
                }
            }
            items.push(BenchItem {
                name: file.display().to_string(),
                h,
                k,
                load: Box::new(move || {
                    let g = load_graph(&file)?;
                    match &td {
                        Some(p) => Ok((g.clone(), Some(parse_td(&read(p)?, &g)?), "file")),
                        None => Ok((g, None, "min-fill")),
                    }
                }),
            });
        }
    }
    Ok(items)
}

fn bench(a: &BenchArgs) -> Result<ExitCode> {
    let start = Instant::now();
    let run = run_options(a.parallel)?;
    let mut rows = Vec::new();
    for item in bench_items(a)? {
        let mut row = BenchRow {
            name: item.name.clone(),
            n: None,
            e: None,
            width: None,
            h: item.h,
            optimum: None,
            feasible: None,
            time_ms: None,
            max_states: None,
            error: None,
        };
        let t = Instant::now();
        let outcome = (|| -> Result<()> {
            let (g, td, src) = (item.load)()?;
            row.n = Some(g.n());
            row.e = Some(g.m());
            let prep = prepare(
                &g,
                None,
                Some(src),
                Some(td.unwrap_or_else(|| decompose_min_fill(&g))),
            )?;
            row.width = Some(prep.instance.width);
            let spec = ProblemSpec::new(item.h, item.k.unwrap_or(g.m() as u64));
            let sol = solve_with(
                &g,
                &prep.nd,
                &spec,
                &SolveOptions {
                    witness: false,
                    run: run.clone(),
                },
            )?;
            row.optimum = sol.optimum;
            row.feasible = Some(sol.feasible);
            row.max_states = Some(sol.stats.max_states());
            Ok(())
        })();
        row.time_ms = Some(millis(t));
        if let Err(e) = outcome {
            row.error = Some(format!("{e:#}"));
        }
        rows.push(row);
    }
    let report = BenchReport {
        schema: SCHEMA,
        rows,
        total_ms: millis(start),
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.table());
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(a: &GenerateArgs) -> Result<ExitCode> {
    if a.width == 0 {
        bail!("--width must be at least 1");
    }
    let (g, td) = gen_random_low_tw(a.n, a.width, a.seed);
    print!("{}", to_edge_list(&g));
    if let Some(path) = &a.td_out {
        write(path, &write_td(&td, g.n()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SolveComponents(a) => solve_components(a),
        Command::SolveFamily(a) => solve_family(a),
        Command::Decompose(a) => decompose(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
