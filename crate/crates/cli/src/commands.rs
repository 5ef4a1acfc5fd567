use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ugcsp_core::constructions::{
    compute_params, cops_robbers_graph, k4_example, klein_pair, klein_pair_bipartite, petersen,
    random_inapprox_pair, unsat_complete_graph, KleinColor, KleinPair, PairParams, PairSidecar,
    RandomPair, RobberStrategy, SimpleGraph,
};
use ugcsp_core::game::{
    exhaustive_spoiler_search, play_game, CopsDuplicator, Duplicator, IdentityDuplicator,
    K2Duplicator, Outcome, RandomSpoiler, TreeDuplicator,
};
use ugcsp_core::instances::io::{
    parse_csp, parse_gug, parse_instance, write_assignment, write_group_assignment, write_gug,
    Instance,
};
use ugcsp_core::instances::solve::{
    brute_force_opt, csp_brute_opt, perm_brute_opt, propagate_complete_sat, spanning_tree_opt,
    Budget,
};
use ugcsp_core::instances::{
    label_lift, parse_ratio, ratio_to_string, LiftLimits, Normalization,
};
use ugcsp_core::sdp::{
    build_lc_relaxation, build_maxcut_sdp, expected_cut, gap_curve_estimate, gw_alpha,
    gw_symmetric_value, hyperplane_round, maxcut_brute, solve_sdp_lowrank, write_sdpa,
    WeightedGraph,
};
use ugcsp_core::{AssertLevel, GroupUgInstance, SolverOptions};

use crate::output::{emit, read, write_atomic};
use crate::{
    Cli, Command, DuplicatorArg, GameArgs, GenCommand, NormArg, SdpCommand, SolveArgs, SolverArg,
    SolverFlags, SpoilerArg,
};

/// A game ended with a Duplicator rule violation; maps to exit code 3.
#[derive(Debug)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "strategy violation: {}", self.0)
    }
}

impl std::error::Error for Violation {}

pub fn run(cli: &Cli) -> Result<()> {
    let ts = !cli.no_timestamp;
    match &cli.command {
        Command::Gen(g) => gen(g, cli.seed),
        Command::Lift {
            input,
            output,
            max_vertices,
        } => {
            let base = parse_gug(&read(input)?)?;
            let lifted = label_lift(
                &base,
                LiftLimits {
                    max_vertices: *max_vertices,
                    ..LiftLimits::default()
                },
            )?;
            write_atomic(output, &write_gug(&lifted))
        }
        Command::Solve(args) => solve(args, ts),
        Command::Game(args) => game(args, cli.seed, cli.assert_level.into(), ts),
        Command::Sdp(s) => sdp(s, cli.seed, ts),
        Command::Params {
            alpha,
            gamma,
            epsilon,
            json,
        } => {
            let p = compute_params(*alpha, *gamma, *epsilon)?;
            if *json {
                emit(None, serde_json::to_value(&p)?, false)
            } else {
                println!("d={} ℓ={} m={} r={} q={}", p.d, p.ell, p.m, p.r, p.q);
                Ok(())
            }
        }
        Command::Report { dir, output } => report(dir, output.as_deref(), ts),
    }
}

// ---------------------------------------------------------------------------
// gen

/// JSON sidecar of a Klein pair.
#[derive(Serialize, Deserialize)]
struct KleinSidecar {
    vertices: Vec<String>,
    edges: Vec<KleinEdge>,
    star_edge: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle_of: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct KleinEdge {
    u: String,
    v: String,
    color: KleinColor,
}

fn klein_sidecar(p: &KleinPair, cycle_of: Option<Vec<usize>>) -> KleinSidecar {
    KleinSidecar {
        vertices: p.graph.names().to_vec(),
        edges: p
            .graph
            .edges()
            .iter()
            .zip(&p.coloring)
            .map(|(&(u, v), &color)| KleinEdge {
                u: p.graph.name(u).into(),
                v: p.graph.name(v).into(),
                color,
            })
            .collect(),
        star_edge: p.star_edge,
        cycle_of,
    }
}

fn klein_from_sidecar(s: &KleinSidecar) -> Result<KleinPair> {
    let mut g = SimpleGraph::empty();
    for v in &s.vertices {
        g.add_vertex(v)?;
    }
    for e in &s.edges {
        g.add_edge_by_name(&e.u, &e.v)?;
    }
    let coloring: Vec<KleinColor> = s.edges.iter().map(|e| e.color).collect();
    Ok(klein_pair(&g, &coloring, s.star_edge)?)
}

fn gen(cmd: &GenCommand, seed: u64) -> Result<()> {
    match cmd {
        GenCommand::Unsat { delta, out } => {
            let inst = unsat_complete_graph(&parse_ratio(delta)?)?;
            write_atomic(out, &write_gug(&inst))
        }
        GenCommand::Klein {
            k4,
            cops_k,
            graph,
            out_dir,
        } => {
            let (pair, cycle_of) = if *k4 {
                (k4_example(), None)
            } else if let Some(k) = cops_k {
                let h = cops_robbers_graph(*k)?;
                (klein_pair_bipartite(&h.graph)?, Some(h.cycle_of))
            } else if let Some(path) = graph {
                (klein_pair_bipartite(&SimpleGraph::parse(&read(path)?)?)?, None)
            } else {
                bail!("one of --k4, --cops-k or --graph is required");
            };
            write_atomic(&out_dir.join("base.graph"), &pair.graph.to_text())?;
            write_atomic(&out_dir.join("u1.gug"), &write_gug(&pair.u1))?;
            write_atomic(&out_dir.join("u2.gug"), &write_gug(&pair.u2))?;
            let side = serde_json::to_string_pretty(&klein_sidecar(&pair, cycle_of))? + "\n";
            write_atomic(&out_dir.join("klein.json"), &side)
        }
        GenCommand::CopsGraph { k, out } => {
            let h = cops_robbers_graph(*k)?;
            write_atomic(out, &h.graph.to_text())
        }
        GenCommand::RandomPair {
            graph,
            petersen: use_petersen,
            ell,
            m,
            r,
            k,
            girth_override,
            out_dir,
        } => {
            let base = match (graph, use_petersen) {
                (Some(p), _) => SimpleGraph::parse(&read(p)?)?,
                (None, true) => petersen(),
                (None, false) => bail!("one of --graph or --petersen is required"),
            };
            let d = base
                .regular_degree()
                .ok_or_else(|| ugcsp_core::Error::Precondition("base graph is not regular".into()))?;
            let params = PairParams {
                d,
                ell: *ell,
                m: *m,
                r: *r,
                k: *k,
                girth_override: *girth_override,
            };
            info!("random pair seed {seed}");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pair = random_inapprox_pair(&params, &base, &mut rng)?;
            write_atomic(&out_dir.join("u1.gug"), &write_gug(&pair.u1))?;
            write_atomic(&out_dir.join("u2.gug"), &write_gug(&pair.u2))?;
            write_atomic(&out_dir.join("u1_full.gug"), &write_gug(&pair.u1_full))?;
            write_atomic(&out_dir.join("u2_full.gug"), &write_gug(&pair.u2_full))?;
            let side = serde_json::to_string_pretty(&pair.sidecar(seed))? + "\n";
            write_atomic(&out_dir.join("pair.json"), &side)
        }
    }
}

// ---------------------------------------------------------------------------
// solve

fn solve(args: &SolveArgs, ts: bool) -> Result<()> {
    let inst = parse_instance(&read(&args.input)?)?;
    let budget = Budget {
        max_leaves: args.budget,
    };
    let (mut out, witness) = match (&inst, args.solver) {
        (Instance::Group(g), SolverArg::Brute) => {
            let r = brute_force_opt(g, true, budget)?;
            (serde_json::to_value(&r.eval)?, Some(write_group_assignment(g, &r.witness)))
        }
        (Instance::Group(g), SolverArg::Tree) => {
            let r = spanning_tree_opt(g, budget)?;
            (serde_json::to_value(&r.eval)?, Some(write_group_assignment(g, &r.witness)))
        }
        (Instance::Perm(p), SolverArg::Brute) => {
            let r = perm_brute_opt(p, budget)?;
            let w = write_assignment(p.names(), &r.witness, |l| l.to_string());
            (serde_json::to_value(&r.eval)?, Some(w))
        }
        (Instance::Perm(p), SolverArg::Propagate) => {
            let (sat, labels) = propagate_complete_sat(p);
            let w = labels.map(|l| write_assignment(p.names(), &l, |x| x.to_string()));
            (json!({ "completely_satisfiable": sat }), w)
        }
        (Instance::Csp(c), SolverArg::Brute) => {
            let r = csp_brute_opt(c, budget)?;
            let w = write_assignment(c.names(), &r.witness, |l| l.to_string());
            (json!({ "value": ratio_to_string(&r.value) }), Some(w))
        }
        (_, s) => {
            return Err(ugcsp_core::Error::Precondition(format!(
                "solver {s:?} does not apply to this instance kind"
            ))
            .into())
        }
    };
    out["solver"] = format!("{:?}", args.solver).to_lowercase().into();
    out["input"] = args.input.display().to_string().into();
    if let (Some(path), Some(w)) = (&args.witness, &witness) {
        write_atomic(path, w)?;
    }
    emit(args.output.as_deref(), out, ts)
}

// ---------------------------------------------------------------------------
// game

fn load_gug(path: &Option<PathBuf>, flag: &str) -> Result<GroupUgInstance> {
    let p = path.as_ref().ok_or_else(|| anyhow!("--{flag} is required"))?;
    Ok(parse_gug(&read(p)?)?)
}

fn run_game<D: Duplicator + Clone>(
    a: &GroupUgInstance,
    b: &GroupUgInstance,
    mut dup: D,
    args: &GameArgs,
    seed: u64,
    level: AssertLevel,
) -> Result<(Value, Option<String>)> {
    match args.spoiler {
        SpoilerArg::Random => {
            info!("random spoiler seed {seed}");
            let t = play_game(
                a,
                b,
                args.k,
                &mut dup,
                &mut RandomSpoiler::new(seed),
                args.rounds,
                level,
            )?;
            let violation = match &t.outcome {
                Outcome::Violation { detail, .. } => Some(detail.clone()),
                _ => None,
            };
            let mut v = serde_json::to_value(&t)?;
            v["spoiler"] = "random".into();
            v["seed"] = seed.into();
            Ok((v, violation))
        }
        SpoilerArg::Exhaustive => {
            let s = exhaustive_spoiler_search(a, b, args.k, &dup, args.depth, args.budget, level)?;
            let line = s.winning_line.map(|moves| {
                moves
                    .into_iter()
                    .map(|(p, (v, g))| json!({ "pebble": p, "vertex": a.vertex_name(v), "label": g.to_hex() }))
                    .collect::<Vec<_>>()
            });
            Ok((
                json!({
                    "k": args.k,
                    "duplicator": dup.name(),
                    "spoiler": "exhaustive",
                    "depth": args.depth,
                    "spoiler_wins": line.is_some(),
                    "winning_line": line,
                    "nodes": s.nodes,
                }),
                None,
            ))
        }
    }
}

fn game(args: &GameArgs, seed: u64, level: AssertLevel, ts: bool) -> Result<()> {
    let (value, violation) = match args.duplicator {
        DuplicatorArg::Identity => {
            let (a, b) = (load_gug(&args.a, "a")?, load_gug(&args.b, "b")?);
            run_game(&a, &b, IdentityDuplicator, args, seed, level)?
        }
        DuplicatorArg::K2 => {
            let (a, b) = (load_gug(&args.a, "a")?, load_gug(&args.b, "b")?);
            run_game(&a, &b, K2Duplicator::new(), args, seed, level)?
        }
        DuplicatorArg::Cops => {
            let path = args.klein.as_ref().ok_or_else(|| anyhow!("--klein is required"))?;
            let side: KleinSidecar = serde_json::from_str(&read(path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            let pair = klein_from_sidecar(&side)?;
            let strategy = match side.cycle_of {
                Some(cycle_of) => RobberStrategy::CycleRefuge { cycle_of },
                None => RobberStrategy::CopFreeEdge,
            };
            let dup = CopsDuplicator::new(pair.clone(), strategy);
            run_game(&pair.u1, &pair.u2, dup, args, seed, level)?
        }
        DuplicatorArg::Tree => {
            let path = args.pair.as_ref().ok_or_else(|| anyhow!("--pair is required"))?;
            let side: PairSidecar = serde_json::from_str(&read(path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            let pair = RandomPair::from_sidecar(&side)?;
            run_game(&pair.u1, &pair.u2, TreeDuplicator::new(&pair), args, seed, level)?
        }
    };
    emit(args.output.as_deref(), value, ts)?;
    match violation {
        Some(d) => Err(Violation(d).into()),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// sdp

fn solver_options(f: &SolverFlags) -> SolverOptions {
    SolverOptions {
        tol: f.tol,
        restarts: f.restarts,
        ..SolverOptions::default()
    }
}

fn normalization(n: NormArg) -> Normalization {
    match n {
        NormArg::Weight => Normalization::Weight,
        NormArg::Count => Normalization::Count,
    }
}

/// Edge weights from `<u> <v> <weight>` lines; unlisted edges weigh 1.
fn load_weights(g: &SimpleGraph, path: Option<&Path>) -> Result<WeightedGraph> {
    let mut wg = WeightedGraph::unit(g.clone());
    let Some(path) = path else { return Ok(wg) };
    for (i, line) in read(path)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [u, v, w] => {
                let find = |n: &str| {
                    g.vertex_index(n)
                        .ok_or_else(|| ugcsp_core::Error::parse(i + 1, format!("unknown vertex `{n}`")))
                };
                let e = g
                    .edge_id(find(u)?, find(v)?)
                    .ok_or_else(|| ugcsp_core::Error::parse(i + 1, format!("no edge {u}-{v}")))?;
                wg.weights[e] = parse_ratio(w)?;
            }
            _ => return Err(ugcsp_core::Error::parse(i + 1, "expected `<u> <v> <weight>`").into()),
        }
    }
    Ok(wg)
}

fn sdp(cmd: &SdpCommand, seed: u64, ts: bool) -> Result<()> {
    match cmd {
        SdpCommand::Maxcut {
            graph,
            weights,
            trials,
            solver,
            output,
            sdpa,
        } => {
            let g = SimpleGraph::parse(&read(graph)?)?;
            let wg = load_weights(&g, weights.as_deref())?;
            let inst = build_maxcut_sdp(&wg);
            if let Some(p) = sdpa {
                write_atomic(p, &write_sdpa(&inst))?;
            }
            info!("sdp seed {seed}");
            let sol = solve_sdp_lowrank(&inst, &solver_options(solver), seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let stats = hyperplane_round(&sol, &wg, &mut rng, *trials)?;
            let opt = if wg.n() <= 20 {
                let (v, _) = maxcut_brute(&wg)?;
                Some(v.to_f64().unwrap_or(f64::NAN))
            } else {
                None
            };
            let mut out = serde_json::to_value(sol.report())?;
            out["spread"] = sol.spread.into();
            out["gw_alpha"] = gw_alpha().into();
            out["gw_symmetric_value"] = gw_symmetric_value(&sol, &wg).into();
            out["expected_cut"] = expected_cut(&sol, &wg).into();
            out["rounding"] = json!({
                "mean": stats.mean,
                "std": stats.std,
                "std_error": stats.std_error(),
                "trials": stats.trials,
            });
            out["opt"] = opt.into();
            emit(output.as_deref(), out, ts)
        }
        SdpCommand::Lc {
            input,
            normalize,
            solver,
            output,
            sdpa,
        } => {
            let csp = parse_csp(&read(input)?)?;
            let (norm, scale) = csp.normalized(normalization(*normalize));
            let inst = build_lc_relaxation(&norm)?;
            if let Some(p) = sdpa {
                write_atomic(p, &write_sdpa(&inst))?;
            }
            info!("sdp seed {seed}");
            let sol = solve_sdp_lowrank(&inst, &solver_options(solver), seed)?;
            let mut out = serde_json::to_value(sol.report())?;
            out["spread"] = sol.spread.into();
            out["scale"] = ratio_to_string(&scale).into();
            out["min_eigenvalue"] = sol.min_eigenvalue().into();
            emit(output.as_deref(), out, ts)
        }
        SdpCommand::Gap {
            family,
            eta,
            grid,
            normalize,
            solver,
            output,
        } => {
            let insts = family
                .iter()
                .map(|p| Ok(parse_csp(&read(p)?)?))
                .collect::<Result<Vec<_>>>()?;
            info!("sdp seed {seed}");
            let table = gap_curve_estimate(
                &insts,
                *eta,
                grid,
                normalization(*normalize),
                &solver_options(solver),
                seed,
            )?;
            // −∞ is not JSON; unreached grid points become null.
            let grid: Vec<Value> = table
                .grid
                .iter()
                .map(|&(c, t)| json!({ "c": c, "theta": t.is_finite().then_some(t) }))
                .collect();
            let out = json!({
                "eta": table.eta,
                "entries": table.entries,
                "grid": grid,
                "seed": seed,
            });
            emit(output.as_deref(), out, ts)
        }
    }
}

// ---------------------------------------------------------------------------
// report

fn report(dir: &Path, output: Option<&Path>, ts: bool) -> Result<()> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter(|p| output.is_none_or(|o| o != p.as_path()))
        .collect();
    files.sort();
    let mut runs = serde_json::Map::new();
    for f in &files {
        let v: Value = serde_json::from_str(&read(f)?).with_context(|| format!("parsing {}", f.display()))?;
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        runs.insert(name, v);
    }
    emit(output, json!({ "count": files.len(), "runs": runs }), ts)
}
