use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sl2gen::amalgam::{amalgam_reduce, classify_side, factors_in_h, normal_form_check, AmalgamError};
use sl2gen::expr::{
    certificate_to_json, emit_certificate, load_certificate, neighborhood_dot, parse_elem, parse_matrix,
    parse_ring_spec, path_dot,
};
use sl2gen::ring::{RingSpec, Valuation};
use sl2gen::search::{bounded_e2_search, bounded_h0_search, SearchBudget, SearchError, SearchOutcome};
use sl2gen::sl2::{e2_generating_set, word_eval, Mat2};
use sl2gen::tree::{base_vertex, geodesic, neighbors, TreeVertex};
use sl2gen::witness::{
    attach_search, laurent_ambient, laurent_witness, mainstep_ambient, mainstep_witness, more_examples_witness,
    verify_certificate, WitnessCertificate, WitnessError,
};

#[derive(Parser)]
#[command(name = "sl2gen", version, about = "SL2 over polynomial rings: valuations, trees, amalgams, witnesses, search")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized helpers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Local {
    /// Ring spec, e.g. "Z[s,t]" or "F3[u]".
    #[arg(long)]
    ring: String,
    /// Prime element defining the valuation.
    #[arg(long)]
    pi: String,
}

#[derive(Args, Clone)]
struct Caps {
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 16)]
    height: u64,
    #[arg(long, default_value_t = 8)]
    degree: u32,
    /// Work ceiling (defaults to SL2_SEARCH_CEILING or the built-in value).
    #[arg(long, env = "SL2_SEARCH_CEILING")]
    ceiling: Option<u128>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Valuation of an expression.
    Val {
        #[command(flatten)]
        local: Local,
        #[arg(long)]
        expr: String,
    },
    /// Amalgam side of a matrix.
    Classify {
        #[command(flatten)]
        local: Local,
        #[arg(long)]
        matrix: String,
    },
    /// Amalgam normal form of a matrix in SL2(R[1/pi]).
    Reduce {
        #[command(flatten)]
        local: Local,
        #[arg(long)]
        matrix: String,
    },
    /// Bruhat-Tits tree queries.
    Tree {
        #[command(subcommand)]
        cmd: TreeCmd,
    },
    /// Certificate generation.
    Witness {
        #[command(subcommand)]
        cmd: WitnessCmd,
    },
    /// Bounded search over elementary matrices.
    SearchE2 {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        caps: Caps,
    },
    /// Bounded search over SL2(R) and its conjugate by D(1/pi,1).
    SearchH0 {
        #[command(flatten)]
        local: Local,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        entry_height: u64,
        #[arg(long, default_value_t = 1)]
        entry_degree: u32,
        #[arg(long, env = "SL2_SEARCH_CEILING")]
        ceiling: Option<u128>,
    },
    /// Re-check a certificate.
    Verify {
        #[arg(long)]
        cert: String,
        #[arg(long)]
        rerun_search: bool,
    },
    /// Finite generating set of E2 over a ring with all variables inverted.
    Gens {
        #[arg(long)]
        ring: String,
        /// Also re-find this many random products of length <= 4 by search.
        #[arg(long, default_value_t = 0)]
        check_products: usize,
    },
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Geodesic between two vertices.
    Path {
        #[command(flatten)]
        local: Local,
        /// Start vertex "n,u" (default the base vertex).
        #[arg(long)]
        from: Option<String>,
        /// End vertex "n,u".
        #[arg(long, conflicts_with = "matrix")]
        to: Option<String>,
        /// End at the image of the base vertex under this matrix.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        dot: bool,
    },
    /// Ball around a vertex.
    Neighbors {
        #[command(flatten)]
        local: Local,
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, default_value_t = 1)]
        radius: u32,
        /// Residue lifts sampled when the residue ring is infinite.
        #[arg(long, default_value_t = 6)]
        sample: usize,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Args)]
struct Out {
    /// Write the certificate here instead of standard output.
    #[arg(long)]
    out: Option<String>,
    /// Run the bounded search to this depth and record it (0 = skip).
    #[arg(long, default_value_t = 0)]
    search_depth: usize,
    #[arg(long, default_value_t = 16)]
    height: u64,
    #[arg(long, default_value_t = 8)]
    degree: u32,
}

#[derive(Subcommand)]
enum WitnessCmd {
    Mainstep {
        #[arg(long)]
        base: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        assert_prime: bool,
        #[command(flatten)]
        out: Out,
    },
    Laurent {
        #[arg(long)]
        base: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        out: Out,
    },
    More {
        #[arg(long)]
        base: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        p: String,
        /// The matrix b' over R0[s].
        #[arg(long)]
        bprime: String,
        #[arg(long)]
        assert_prime: bool,
        #[command(flatten)]
        out: Out,
    },
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

fn usage(e: impl std::fmt::Display) -> Fail {
    Fail { code: 2, msg: e.to_string() }
}

fn reject(e: impl std::fmt::Display) -> Fail {
    Fail { code: 1, msg: e.to_string() }
}

fn witness_fail(e: WitnessError) -> Fail {
    match e {
        WitnessError::Malformed(_) | WitnessError::Ring(_) => usage(e),
        WitnessError::Search(SearchError::BudgetTooLarge { .. }) => usage(e),
        _ => reject(e),
    }
}

fn search_fail(e: SearchError) -> Fail {
    match e {
        SearchError::NotInSl2 => reject(e),
        _ => usage(e),
    }
}

fn ring(text: &str) -> Result<RingSpec, Fail> {
    parse_ring_spec(text).map_err(usage)
}

fn valuation(local: &Local) -> Result<Valuation, Fail> {
    let spec = ring(&local.ring)?;
    let pi = parse_elem(&local.pi, &spec).map_err(usage)?;
    Valuation::new(&spec, &pi).map_err(usage)
}

fn matrix(text: &str, spec: &RingSpec) -> Result<Mat2, Fail> {
    parse_matrix(text, spec).map_err(usage)
}

fn vertex(text: &str, spec: &RingSpec) -> Result<TreeVertex, Fail> {
    let (n, u) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("vertex {text:?} must look like \"n,u\"")))?;
    let n: i64 = n.trim().parse().map_err(|_| usage(format!("bad level {n:?}")))?;
    Ok(TreeVertex::new(n, parse_elem(u.trim(), spec).map_err(usage)?))
}

fn emit(json_mode: bool, text: String, value: Value) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        print!("{text}");
        if !text.ends_with('\n') {
            println!();
        }
    }
}

fn outcome_json(out: &SearchOutcome) -> Value {
    let mut v = out.stats.to_json();
    if let Some(w) = out.found() {
        v["word"] = json!(w.to_string());
        if !out.table.is_empty() {
            v["table"] = json!(out.table.iter().map(|m| m.to_string()).collect::<Vec<_>>());
        }
    }
    v
}

fn outcome_text(out: &SearchOutcome) -> String {
    let s = &out.stats;
    match out.found() {
        Some(w) => format!("Found at depth {}: {w}\n", s.depth),
        None => format!(
            "NotFoundAtBound (depth {}, menu {}, {} words)\n",
            s.depth, s.menu_size, s.words_enumerated
        ),
    }
}

fn finish_witness(cli: &Cli, mut cert: WitnessCertificate, out: &Out) -> Result<(), Fail> {
    if out.search_depth > 0 {
        let budget = SearchBudget::parametric(out.search_depth, out.height, out.degree);
        attach_search(&mut cert, &budget).map_err(witness_fail)?;
    }
    let text = emit_certificate(&cert);
    match &out.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| usage(format!("{path}: {e}")))?;
            let summary = format!("h = {}\nclaim tier: {}\nwritten to {path}\n", cert.h, cert.claim_tier.name());
            emit(cli.json, summary, certificate_to_json(&cert));
        }
        None if cli.json => print!("{text}"),
        None => {
            let mut s = format!("h = {}\n", cert.h);
            for c in &cert.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                s += &format!("  [{mark}] {}{} {}\n", c.name, if c.required { "" } else { " (info)" }, c.detail);
            }
            s += &format!("claim tier: {}\n", cert.claim_tier.name());
            print!("{s}");
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Fail> {
    match &cli.cmd {
        Cmd::Val { local, expr } => {
            let v = valuation(local)?;
            let e = parse_elem(expr, v.spec()).map_err(usage)?;
            let val = v.of(&e);
            emit(cli.json, val.to_string(), json!({"valuation": val.to_string()}));
        }
        Cmd::Classify { local, matrix: m } => {
            let v = valuation(local)?;
            let g = matrix(m, v.spec())?;
            let p = classify_side(&g, &v).map_err(reject)?;
            let vals: Vec<String> = p.valuations.iter().map(|x| x.to_string()).collect();
            emit(
                cli.json,
                format!("{:?} (valuations {})", p.class, vals.join(" ")),
                json!({"class": format!("{:?}", p.class), "valuations": vals}),
            );
        }
        Cmd::Reduce { local, matrix: m } => {
            let v = valuation(local)?;
            let g = matrix(m, v.spec())?;
            let w = amalgam_reduce(&g, &v).map_err(|e| match e {
                AmalgamError::Ring(_) => usage(e),
                _ => reject(e),
            })?;
            let verified = w.product() == g && normal_form_check(&w);
            let mut text = String::new();
            for (side, f) in &w.factors {
                text += &format!("{side} {f}\n");
            }
            text += &format!("U {}\nlength {}, product verified: {verified}\n", w.trailing, w.factors.len());
            let factors: Vec<Value> = w
                .factors
                .iter()
                .map(|(s, f)| json!({"side": s.to_string(), "matrix": f.to_string()}))
                .collect();
            emit(
                cli.json,
                text,
                json!({
                    "factors": factors,
                    "trailing": w.trailing.to_string(),
                    "length": w.factors.len(),
                    "product_verified": verified,
                    "factors_in_h": factors_in_h(&w),
                }),
            );
            if !verified {
                return Err(reject("reduction failed to verify"));
            }
        }
        Cmd::Tree { cmd } => tree(cli, cmd)?,
        Cmd::Witness { cmd } => match cmd {
            WitnessCmd::Mainstep { base, f, p, assert_prime, out } => {
                let base = ring(base)?;
                let amb = mainstep_ambient(&base).map_err(witness_fail)?;
                let f = parse_elem(f, &amb).map_err(usage)?;
                let p = parse_elem(p, &amb).map_err(usage)?;
                let cert = mainstep_witness(&base, &f, &p, *assert_prime).map_err(witness_fail)?;
                finish_witness(cli, cert, out)?;
            }
            WitnessCmd::Laurent { base, x, y, out } => {
                let base = ring(base)?;
                let amb = laurent_ambient(&base).map_err(witness_fail)?;
                let x = parse_elem(x, &amb).map_err(usage)?;
                let y = parse_elem(y, &amb).map_err(usage)?;
                let cert = laurent_witness(&base, &x, &y).map_err(witness_fail)?;
                finish_witness(cli, cert, out)?;
            }
            WitnessCmd::More { base, f, p, bprime, assert_prime, out } => {
                let base = ring(base)?;
                let amb = mainstep_ambient(&base).map_err(witness_fail)?;
                let f = parse_elem(f, &amb).map_err(usage)?;
                let p = parse_elem(p, &amb).map_err(usage)?;
                let bp = matrix(bprime, &amb)?;
                let cert = more_examples_witness(&base, &f, &p, &bp, *assert_prime).map_err(witness_fail)?;
                finish_witness(cli, cert, out)?;
            }
        },
        Cmd::SearchE2 { ring: r, matrix: m, caps } => {
            let spec = ring(r)?;
            let target = matrix(m, &spec)?;
            let mut budget = SearchBudget::parametric(caps.depth, caps.height, caps.degree);
            budget.ceiling = caps.ceiling;
            let out = bounded_e2_search(&target, &spec, &budget).map_err(search_fail)?;
            emit(cli.json, outcome_text(&out), outcome_json(&out));
        }
        Cmd::SearchH0 { local, matrix: m, depth, entry_height, entry_degree, ceiling } => {
            let v = valuation(local)?;
            let h = v.spec().localize(vec![v.pi().clone()]).map_err(usage)?;
            let target = matrix(m, &h)?;
            let out = bounded_h0_search(&target, v.spec(), v.pi(), *depth, *entry_height, *entry_degree, *ceiling)
                .map_err(search_fail)?;
            emit(cli.json, outcome_text(&out), outcome_json(&out));
        }
        Cmd::Verify { cert, rerun_search } => {
            let text = fs::read_to_string(cert).map_err(|e| usage(format!("{cert}: {e}")))?;
            let cert = load_certificate(&text).map_err(usage)?;
            let report = verify_certificate(&cert, *rerun_search).map_err(witness_fail)?;
            let mut s = String::new();
            for c in &report.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                s += &format!("[{mark}] {}{}\n", c.name, if c.required { "" } else { " (info)" });
            }
            s += &format!("claim tier: {}\n", report.claim_tier.name());
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "required": c.required, "detail": c.detail}))
                .collect();
            emit(
                cli.json,
                s,
                json!({"checks": checks, "claim_tier": report.claim_tier.name(), "tier_matches": report.tier_matches}),
            );
            if !report.all_required_pass() || !report.tier_matches {
                return Err(reject("certificate failed verification"));
            }
        }
        Cmd::Gens { ring: r, check_products } => {
            let spec = ring(r)?;
            let gens = e2_generating_set(&spec).map_err(usage)?;
            let mut text: String = gens.iter().map(|g| format!("{g}\n")).collect();
            text += &format!("{} generators\n", gens.len());
            let mut refound = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            for _ in 0..*check_products {
                let len = rng.gen_range(0..=4);
                let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..gens.len())).collect();
                let target = idx.iter().fold(Mat2::identity(&spec), |acc, &i| acc.mul(&gens[i]));
                let out = bounded_e2_search(&target, &spec, &SearchBudget::finite(len, gens.clone()))
                    .map_err(search_fail)?;
                let ok = out
                    .found()
                    .map(|w| word_eval(w, &out.table, &spec).ok() == Some(target.clone()))
                    .unwrap_or(false);
                text += &format!("product {idx:?}: {}\n", if ok { "re-found" } else { "NOT found" });
                refound.push(json!({"indices": idx, "found": ok}));
            }
            let all = refound.iter().all(|v| v["found"] == json!(true));
            emit(
                cli.json,
                text,
                json!({
                    "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                    "count": gens.len(),
                    "products": refound,
                }),
            );
            if !all {
                return Err(reject("a planted product was not re-found"));
            }
        }
    }
    Ok(())
}

fn tree(cli: &Cli, cmd: &TreeCmd) -> Result<(), Fail> {
    match cmd {
        TreeCmd::Path { local, from, to, matrix: m, dot } => {
            let v = valuation(local)?;
            let start = match from {
                Some(s) => vertex(s, v.spec())?,
                None => base_vertex(&v),
            };
            let end = match (to, m) {
                (Some(s), _) => vertex(s, v.spec())?,
                (None, Some(m)) => {
                    let h = v.spec().localize(vec![v.pi().clone()]).map_err(usage)?;
                    let g = matrix(m, &h)?;
                    sl2gen::tree::act(&g, &base_vertex(&v), &v).map_err(reject)?
                }
                (None, None) => return Err(usage("give --to or --matrix")),
            };
            let path = geodesic(&start, &end, &v);
            let text = if *dot {
                path_dot(&path)
            } else {
                path.iter().map(|w| format!("{w}\n")).collect::<String>()
                    + &format!("distance {}\n", path.len() - 1)
            };
            emit(
                cli.json,
                text,
                json!({"path": path.iter().map(|w| w.to_string()).collect::<Vec<_>>(), "distance": path.len() - 1}),
            );
        }
        TreeCmd::Neighbors { local, vertex: w, radius, sample, dot } => {
            let v = valuation(local)?;
            let center = match w {
                Some(s) => vertex(s, v.spec())?,
                None => base_vertex(&v),
            };
            if *dot {
                let (text, complete) = neighborhood_dot(&center, *radius, &v, *sample);
                emit(cli.json, text.clone(), json!({"dot": text, "complete": complete}));
            } else {
                let nb = neighbors(&center, &v, *sample);
                let list: Vec<String> = nb.vertices.iter().map(|x| x.to_string()).collect();
                let mut text: String = list.iter().map(|x| format!("{x}\n")).collect();
                text += &format!("{} neighbors{}\n", list.len(), if nb.complete { "" } else { " (sampled)" });
                emit(cli.json, text, json!({"neighbors": list, "complete": nb.complete}));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
