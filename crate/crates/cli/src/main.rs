use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liftcert::codes::{
    circulant_structure_check, code_dimension, css_valid, free_action_check, lifted_product, lifted_product_ring,
    local_code_search, tanner_from_certificate, BitMatrix, CSSCode, CSSJson, DistanceMode, GroupAlgebraMatrix,
    LinearCodeF2,
};
use liftcert::graphs::{random_regular, GraphJson, RegularGraph, Signing, SigningJson};
use liftcert::groups::{AbelianGroupSpec, CharacterIndex, GroupDescriptor};
use liftcert::hikes::{count_bounds, enumerate_hikes};
use liftcert::pseudorandom::{
    bias_best_effort, bias_exact, biased_set_search, hoeffding_tail_check, DistributionJson, SigningDistribution,
};
use liftcert::search::{derandomized_lift_search, evaluate_signing, exponential_regime_build, LiftCertificate};
use liftcert::spectral::{
    adjacency_report, ihara_check, lambda, mixing_check, signed_adjacency_report, spectrum_union_check,
};
use liftcert::{sha256_hex, Error};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "liftcert", version, about = "Certified abelian lifts, spectra and codes")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LIFTCERT_THREADS")]
    threads: Option<usize>,
    /// Print the JSON artifact on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON artifact to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a named or random regular base graph.
    GenBase(GenBaseArgs),
    /// Spectra of a graph or signed base, with optional checks.
    Spectrum(SpectrumArgs),
    /// Search a signing distribution or expander walks for a good lift.
    LiftSearch(LiftSearchArgs),
    /// Count hikes by brute force and compare with the counting bounds.
    Hikes(HikesArgs),
    /// Small-bias distributions and walk concentration.
    #[command(subcommand)]
    Pseudorandom(PseudoCommand),
    /// Tanner and lifted-product codes.
    #[command(subcommand)]
    Codes(CodesCommand),
}

#[derive(Args, Debug, Serialize)]
struct GenBaseArgs {
    /// k4, petersen, complete:N or cycle:N.
    #[arg(long, conflicts_with = "n")]
    named: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resample (seed, seed+1, ...) until λ is at most this.
    #[arg(long)]
    max_lambda: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SpectrumCheck {
    Union,
    Ihara,
    Mixing,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Signing JSON, or a lift certificate carrying one
    #[arg(long)]
    signing: Option<PathBuf>,
    #[arg(long, value_enum)]
    check: Option<SpectrumCheck>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// 1-based vertex set S for the mixing check.
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    /// 1-based vertex set T for the mixing check.
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
}

#[derive(Args, Debug, Serialize)]
struct LiftSearchArgs {
    #[arg(long)]
    base: PathBuf,
    /// Factor list such as `8` or `2x2`, or a group descriptor JSON file.
    #[arg(long)]
    group: Option<String>,
    /// `uniform`, `walk:seeds=N`, or a distribution JSON file.
    #[arg(long, default_value = "uniform")]
    dist: String,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 36)]
    aux_degree: usize,
    /// Largest uniform support enumerated.
    #[arg(long, default_value_t = 1 << 20)]
    guard: usize,
}

#[derive(Args, Debug, Serialize)]
struct HikesArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    singleton_free: bool,
    /// `n,d,k,r,delta` overriding the graph-derived parameters.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
}

#[derive(Subcommand, Debug)]
enum PseudoCommand {
    /// The full product H^m.
    Uniform(UniformArgs),
    /// Search for a small ν-biased set.
    Search(BiasSearchArgs),
    /// Recompute the bias of a distribution file.
    Bias(BiasArgs),
    /// Empirical tail of walk-signing character sums.
    Hoeffding(HoeffdingArgs),
}

#[derive(Args, Debug, Serialize)]
struct UniformArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1 << 20)]
    guard: usize,
}

#[derive(Args, Debug, Serialize)]
struct BiasSearchArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    nu: f64,
    #[arg(long, default_value_t = 64)]
    size_budget: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct BiasArgs {
    #[arg(long)]
    dist: PathBuf,
    /// Character samples when exact evaluation is out of range.
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct HoeffdingArgs {
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 36)]
    aux_degree: usize,
    /// 1-based edge ids; all edges when omitted.
    #[arg(long, value_delimiter = ',')]
    edges: Vec<usize>,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum CodesCommand {
    /// Tanner code of a certified lift.
    BuildTanner(TannerArgs),
    /// Lifted-product CSS code from two ring matrices.
    BuildLp(LpArgs),
    /// Basic parameters of a code file.
    Stats(CodeFileArgs),
    /// Minimum distance of a code file.
    Distance(DistanceArgs),
}

#[derive(Args, Debug, Serialize)]
struct TannerArgs {
    #[arg(long)]
    cert: PathBuf,
    /// even-weight, repetition, hamming, full, or search:DIST,DUAL[,BUDGET].
    #[arg(long, default_value = "even-weight")]
    local: String,
    #[arg(long, default_value_t = 0)]
    local_seed: u64,
    /// Also write the parity matrix as an alist file.
    #[arg(long)]
    alist: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LpVariant {
    Hypergraph,
    Ring,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DistanceChoice {
    None,
    Exact,
    InformationSet,
}

#[derive(Args, Debug, Serialize)]
struct LpArgs {
    /// Rows separated by `;`, entries by `,`, e.g. `1+x,x^2;0,1`.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long)]
    l: u32,
    #[arg(long, value_enum, default_value = "hypergraph")]
    variant: LpVariant,
    #[arg(long, value_enum, default_value = "none")]
    distance: DistanceChoice,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct CodeFileArgs {
    /// CSS code JSON.
    #[arg(long, conflicts_with = "alist")]
    code: Option<PathBuf>,
    /// Classical parity matrix in alist format.
    #[arg(long)]
    alist: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DistanceArgs {
    #[command(flatten)]
    file: CodeFileArgs,
    #[arg(long, value_enum, default_value = "exact")]
    mode: DistanceChoice,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failed run that is not a check failure.
#[derive(Debug)]
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Usage>;

struct Outcome {
    body: Value,
    pass: bool,
    summary: String,
    reason: Option<String>,
}

#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn read(&mut self, path: &Path) -> Run<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        self.0.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Run<T> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Usage(format!("{}: {e}", path.display())))
    }

    fn graph(&mut self, path: &Path) -> Run<RegularGraph> {
        let j: GraphJson = self.json(path)?;
        Ok(RegularGraph::from_json(&j)?)
    }
}

fn parse_group(spec: &str, inputs: &mut Inputs) -> Run<AbelianGroupSpec> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let desc: GroupDescriptor = inputs.json(Path::new(spec))?;
        return Ok(AbelianGroupSpec::from_descriptor(&desc)?);
    }
    let factors = spec
        .split(['x', ','])
        .map(|f| {
            f.trim()
                .parse::<u32>()
                .map_err(|_| Usage(format!("bad group factor {f:?}")))
        })
        .collect::<Run<Vec<_>>>()?;
    Ok(AbelianGroupSpec::from_factors(&factors)?)
}

fn parse_ring_matrix(l: u32, text: &str) -> Run<GroupAlgebraMatrix> {
    let rows: Vec<Vec<&str>> = text.split(';').map(|r| r.split(',').collect()).collect();
    Ok(GroupAlgebraMatrix::parse(l, &rows)?)
}

fn one_based(xs: &[usize], bound: usize, what: &str) -> Run<Vec<usize>> {
    xs.iter()
        .map(|&x| {
            if x == 0 || x > bound {
                Err(Usage(format!("{what} {x} outside 1..={bound}")))
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("artifact serializes")
}

fn gen_base(args: &GenBaseArgs) -> Run<Outcome> {
    let (g, seed_used) = match (&args.named, args.n) {
        (Some(name), _) => {
            let g = match name.split_once(':') {
                None if name == "k4" => RegularGraph::complete(4),
                None if name == "petersen" => RegularGraph::petersen(),
                Some(("complete", n)) => {
                    RegularGraph::complete(n.parse().map_err(|_| Usage(format!("bad size in {name}")))?)
                }
                Some(("cycle", n)) => {
                    let n: usize = n.parse().map_err(|_| Usage(format!("bad size in {name}")))?;
                    if n < 3 {
                        return Err(Usage("cycles need at least 3 vertices".into()));
                    }
                    RegularGraph::cycle(n)
                }
                _ => return Err(Usage(format!("unknown named graph {name:?}"))),
            };
            (g, None)
        }
        (None, Some(n)) => {
            let mut found = None;
            for attempt in 0..args.budget.max(1) as u64 {
                let seed = args.seed.wrapping_add(attempt);
                let g = random_regular(n, args.d, seed)?;
                if args.max_lambda.is_none_or(|m| lambda(&g).is_ok_and(|l| l <= m)) {
                    found = Some((g, Some(seed)));
                    break;
                }
            }
            match found {
                Some(f) => f,
                None => {
                    return Ok(Outcome {
                        body: json!({ "found": false, "budget": args.budget }),
                        pass: false,
                        summary: "no graph met the λ threshold".into(),
                        reason: Some(format!("no seed within budget {} met max-lambda", args.budget)),
                    })
                }
            }
        }
        (None, None) => return Err(Usage("pass --named or --n".into())),
    };
    let lam = lambda(&g)?;
    let mut body = to_value(&g.to_json());
    body["lambda"] = json!(lam);
    body["seed_used"] = json!(seed_used);
    body["hash"] = json!(g.content_hash());
    Ok(Outcome {
        body,
        pass: true,
        summary: format!("n = {}, d = {}, λ = {lam:.6}", g.n(), g.d()),
        reason: None,
    })
}

fn spectrum(args: &SpectrumArgs, inputs: &mut Inputs) -> Run<Outcome> {
    let g = inputs.graph(&args.graph)?;
    let s = match &args.signing {
        Some(p) => {
            let v: Value = inputs.json(p)?;
            let j: SigningJson = match v.get("signing") {
                Some(inner) => serde_json::from_value(inner.clone()),
                None => serde_json::from_value(v),
            }
            .map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            Some(Signing::from_json(&g, &j)?)
        }
        None => None,
    };
    let outcome = |body: Value, pass: bool, summary: String| Outcome {
        body,
        pass,
        reason: (!pass).then(|| summary.clone()),
        summary,
    };
    match args.check {
        None => match &s {
            None => {
                let rep = adjacency_report(&g)?;
                let summary = format!("λ = {:.10}", rep.rho2);
                Ok(outcome(json!({ "adjacency": rep }), true, summary))
            }
            Some(s) => {
                let eval = evaluate_signing(&g, s, lambda(&g)?)?;
                let reports = s
                    .group()
                    .all_characters()
                    .into_iter()
                    .map(|chi| Ok(json!({ "character": chi, "adjacency": signed_adjacency_report(&g, s, &chi)? })))
                    .collect::<Run<Vec<_>>>()?;
                let summary = format!("λ(lift) = {:.10}", eval.lambda);
                Ok(outcome(
                    json!({ "lambda_lift": eval.lambda, "characters": reports }),
                    true,
                    summary,
                ))
            }
        },
        Some(SpectrumCheck::Union) => {
            let s = s.ok_or_else(|| Usage("--check union needs --signing".into()))?;
            let rep = spectrum_union_check(&g, &s)?;
            let pass = rep.adjacency_distance.max(rep.nonbacktracking_distance) <= args.tol;
            let summary = format!(
                "union distances: A {:.2e}, B {:.2e}",
                rep.adjacency_distance, rep.nonbacktracking_distance
            );
            let mut body = to_value(&rep);
            body["pass"] = json!(pass);
            body["tolerance"] = json!(args.tol);
            Ok(outcome(body, pass, summary))
        }
        Some(SpectrumCheck::Ihara) => {
            let (s, chars): (Signing, Vec<CharacterIndex>) = match s {
                Some(s) => {
                    let chars = s.group().all_characters();
                    (s, chars)
                }
                None => {
                    let trivial = AbelianGroupSpec::cyclic(1)?;
                    let chars = trivial.all_characters();
                    (Signing::identity(&g, trivial), chars)
                }
            };
            let reports = chars
                .iter()
                .map(|chi| Ok((chi.clone(), ihara_check(&g, &s, chi)?)))
                .collect::<Run<Vec<_>>>()?;
            let min_slack = reports.iter().map(|(_, r)| r.slack).fold(f64::INFINITY, f64::min);
            let pass = min_slack >= -args.tol;
            let rows: Vec<Value> = reports
                .into_iter()
                .map(|(chi, r)| json!({ "character": chi, "report": r }))
                .collect();
            let summary = format!("Ihara bound, minimum slack {min_slack:.3e}");
            Ok(outcome(
                json!({ "checks": rows, "min_slack": min_slack, "pass": pass }),
                pass,
                summary,
            ))
        }
        Some(SpectrumCheck::Mixing) => {
            let target = match &s {
                Some(s) => liftcert::graphs::lift(&g, s, false)?,
                None => g,
            };
            let s_set = one_based(&args.s, target.n(), "vertex")?;
            let t_set = one_based(&args.t, target.n(), "vertex")?;
            let rep = mixing_check(&target, &s_set, &t_set)?;
            let summary = format!("mixing: lhs {:.6} ≤ rhs {:.6}", rep.lhs, rep.rhs);
            let pass = rep.pass;
            Ok(outcome(to_value(&rep), pass, summary))
        }
    }
}

fn lift_search(args: &LiftSearchArgs, inputs: &mut Inputs) -> Run<Outcome> {
    let base = inputs.graph(&args.base)?;
    let (cert, success): (LiftCertificate, bool) = if let Some(rest) = args.dist.strip_prefix("walk:") {
        let seeds: usize = rest
            .strip_prefix("seeds=")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Usage(format!("expected walk:seeds=N, got {:?}", args.dist)))?;
        let group = parse_group(args.group.as_deref().unwrap_or("8"), inputs)?;
        let [l] = group.factors() else {
            return Err(Usage("walk signings need a cyclic group".into()));
        };
        let mut cert = exponential_regime_build(&base, *l as usize, seeds, args.aux_degree, args.seed)?;
        cert.target = args.target;
        cert.meets_target = args.target.map(|t| cert.lambda <= t);
        let success = cert.meets_target.unwrap_or(true);
        (cert, success)
    } else {
        let dist = if args.dist == "uniform" {
            let group = parse_group(
                args.group
                    .as_deref()
                    .ok_or_else(|| Usage("uniform search needs --group".into()))?,
                inputs,
            )?;
            SigningDistribution::uniform_exhaustive(group, base.num_edges(), args.guard)?
        } else {
            let j: DistributionJson = inputs.json(Path::new(&args.dist))?;
            let dist = SigningDistribution::from_json(&j)?;
            if let Some(g) = &args.group {
                if parse_group(g, inputs)? != *dist.group() {
                    return Err(Usage("--group disagrees with the distribution file".into()));
                }
            }
            dist
        };
        let out = derandomized_lift_search(&base, &dist, args.target)?;
        (out.certificate, out.success)
    };
    let summary = format!(
        "λ = {:.10} (candidate {} of {} evaluated){}",
        cert.lambda,
        cert.candidate_index,
        cert.candidates_evaluated,
        match args.target {
            Some(t) if success => format!(", meets target {t}"),
            Some(t) => format!(", misses target {t}"),
            None => String::new(),
        }
    );
    Ok(Outcome {
        body: to_value(&cert),
        pass: success,
        reason: (!success).then(|| {
            format!(
                "best λ = {} exceeds target {}",
                cert.lambda,
                args.target.unwrap_or(f64::NAN)
            )
        }),
        summary,
    })
}

fn hikes(args: &HikesArgs, inputs: &mut Inputs) -> Run<Outcome> {
    let graph = args.graph.as_deref().map(|p| inputs.graph(p)).transpose()?;
    let (n, d, k, r, delta) = match &args.bounds {
        Some(text) => {
            let parts: Vec<&str> = text.split(',').map(str::trim).collect();
            let [n, d, k, r, delta] = parts[..] else {
                return Err(Usage("--bounds expects n,d,k,r,delta".into()));
            };
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Usage(format!("bad integer {s:?} in --bounds")))
            };
            let delta = delta
                .parse::<f64>()
                .map_err(|_| Usage("bad delta in --bounds".into()))?;
            (int(n)?, int(d)?, int(k)?, int(r)?, delta)
        }
        None => {
            let g = graph.as_ref().ok_or_else(|| Usage("pass --graph or --bounds".into()))?;
            let k = args.k.ok_or_else(|| Usage("--k is required".into()))?;
            (g.n(), g.d(), k, g.bicycle_free_radius().radius, args.delta)
        }
    };
    let k = args.k.unwrap_or(k);
    let count = graph
        .as_ref()
        .map(|g| enumerate_hikes(g, k, args.singleton_free, false).map(|e| e.count))
        .transpose()?;
    let bounds = count_bounds(n, d, k, r, delta);
    let (bound1, bound2, regime) = match &bounds {
        Ok(b) => (Some(b.bound1), b.bound2, b.regime.clone()),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let pass = match (count, bound1) {
        (Some(c), Some(b)) => (c as f64) <= b,
        _ => true,
    };
    let body = json!({
        "count": count,
        "bound1": bound1,
        "bound2": bound2,
        "pass": pass,
        "params": { "n": n, "d": d, "k": k, "r": r, "delta": delta },
        "bounds": bounds.ok(),
        "regime": regime,
    });
    let summary = format!(
        "count {}, bound1 {}, bound2 {}",
        shown(count),
        shown(bound1),
        shown(bound2)
    );
    Ok(Outcome {
        body,
        pass,
        reason: (!pass).then(|| "hike count exceeds bound".to_string()),
        summary,
    })
}

fn shown<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

fn pseudorandom(cmd: &PseudoCommand, inputs: &mut Inputs) -> Run<Outcome> {
    match cmd {
        PseudoCommand::Uniform(a) => {
            let group = parse_group(&a.group, inputs)?;
            let dist = SigningDistribution::uniform_exhaustive(group, a.m, a.guard)?;
            let bias = bias_exact(&dist).ok();
            Ok(Outcome {
                body: to_value(&dist.to_json(bias)),
                pass: true,
                summary: format!("{} signings, bias {}", dist.support().len(), shown(bias)),
                reason: None,
            })
        }
        PseudoCommand::Search(a) => {
            let group = parse_group(&a.group, inputs)?;
            let dist = biased_set_search(group, a.m, a.nu, a.size_budget, a.trials, a.seed)?;
            let (bias, exact) = bias_best_effort(&dist, 4096, a.seed);
            let pass = bias <= a.nu + 1e-12;
            Ok(Outcome {
                body: to_value(&dist.to_json(Some(bias))),
                pass,
                summary: format!(
                    "size {}, bias {bias:.6} ({})",
                    dist.support().len(),
                    if exact { "exact" } else { "sampled" }
                ),
                reason: (!pass).then(|| format!("bias {bias} above ν = {}", a.nu)),
            })
        }
        PseudoCommand::Bias(a) => {
            let j: DistributionJson = inputs.json(&a.dist)?;
            let dist = SigningDistribution::from_json(&j)?;
            let (bias, exact) = bias_best_effort(&dist, a.samples, a.seed);
            let pass = j.verified_bias.is_none_or(|claimed| bias <= claimed + 1e-12);
            Ok(Outcome {
                body: json!({ "bias": bias, "exact": exact, "claimed": j.verified_bias, "pass": pass }),
                pass,
                summary: format!("bias {bias:.12} ({})", if exact { "exact" } else { "sampled" }),
                reason: (!pass).then(|| format!("bias {bias} exceeds the claimed {}", shown(j.verified_bias))),
            })
        }
        PseudoCommand::Hoeffding(a) => {
            let base = inputs.graph(&a.base)?;
            let edges = if a.edges.is_empty() {
                (0..base.num_edges()).collect()
            } else {
                one_based(&a.edges, base.num_edges(), "edge")?
            };
            let rep = hoeffding_tail_check(&base, a.l, a.aux_degree, &edges, a.t, a.trials, a.seed)?;
            let summary = format!(
                "tail frequency re {:.4}, im {:.4} vs bound {:.4} + 3σ",
                rep.empirical_re, rep.empirical_im, rep.bound
            );
            let pass = rep.pass;
            Ok(Outcome {
                body: to_value(&rep),
                pass,
                reason: (!pass).then(|| "empirical tail above bound".to_string()),
                summary,
            })
        }
    }
}

fn local_code(spec: &str, d: usize, seed: u64) -> Run<LinearCodeF2> {
    Ok(match spec {
        "even-weight" => LinearCodeF2::even_weight(d),
        "repetition" => LinearCodeF2::repetition(d),
        "full" => LinearCodeF2::full_space(d),
        "hamming" if d == 7 => LinearCodeF2::hamming_7_4(),
        "hamming" => return Err(Usage("the Hamming local code needs degree 7".into())),
        _ => {
            let params = spec
                .strip_prefix("search:")
                .ok_or_else(|| Usage(format!("unknown local code {spec:?}")))?;
            let nums = params
                .split(',')
                .map(|x| x.parse::<usize>().map_err(|_| Usage(format!("bad number in {spec:?}"))))
                .collect::<Run<Vec<_>>>()?;
            let (dist, dual, budget) = match nums[..] {
                [a, b] => (a, b, 100_000),
                [a, b, c] => (a, b, c),
                _ => return Err(Usage("expected search:DIST,DUAL[,BUDGET]".into())),
            };
            local_code_search(d, dist, dual, budget, seed)?
        }
    })
}

enum CodeFile {
    Css(CSSCode),
    Classical(BitMatrix),
}

fn load_code(args: &CodeFileArgs, inputs: &mut Inputs) -> Run<CodeFile> {
    match (&args.code, &args.alist) {
        (Some(p), None) => {
            let j: CSSJson = inputs.json(p)?;
            Ok(CodeFile::Css(CSSCode::from_json(&j)?))
        }
        (None, Some(p)) => {
            let bytes = inputs.read(p)?;
            let text = String::from_utf8(bytes).map_err(|_| Usage("alist file is not UTF-8".into()))?;
            Ok(CodeFile::Classical(BitMatrix::from_alist(&text)?))
        }
        _ => Err(Usage("pass exactly one of --code or --alist".into())),
    }
}

fn distance_mode(choice: DistanceChoice, trials: usize, seed: u64) -> Option<DistanceMode> {
    match choice {
        DistanceChoice::None => None,
        DistanceChoice::Exact => Some(DistanceMode::Exact),
        DistanceChoice::InformationSet => Some(DistanceMode::InformationSet { trials, seed }),
    }
}

fn codes(cmd: &CodesCommand, inputs: &mut Inputs) -> Run<Outcome> {
    match cmd {
        CodesCommand::BuildTanner(a) => {
            let cert: LiftCertificate = inputs.json(&a.cert)?;
            let c0 = local_code(&a.local, cert.base.d, a.local_seed)?;
            let (h, layout) = tanner_from_certificate(&cert, &c0)?;
            let quasi_cyclic = circulant_structure_check(&h, &layout)?;
            let free = free_action_check(&cert)?;
            let rank = h.rank();
            if let Some(p) = &a.alist {
                std::fs::write(p, h.to_alist()).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            }
            let local_distance = c0.min_distance(DistanceMode::Exact)?;
            let body = json!({
                "rows": h.num_rows(),
                "length": h.num_cols(),
                "rank": rank,
                "dimension": h.num_cols() - rank,
                "block": layout.block,
                "quasi_cyclic": quasi_cyclic,
                "free_action": free,
                "max_row_weight": h.max_row_weight(),
                "max_col_weight": h.max_col_weight(),
                "local": { "length": c0.length(), "dimension": c0.dimension(), "distance": local_distance },
                "parity_hash": sha256_hex(h.to_alist().as_bytes()),
            });
            Ok(Outcome {
                body,
                pass: quasi_cyclic,
                summary: format!(
                    "Tanner code [{}, {}], circulant size {}, quasi-cyclic {quasi_cyclic}",
                    h.num_cols(),
                    h.num_cols() - rank,
                    layout.block
                ),
                reason: (!quasi_cyclic).then(|| "parity fails the block-shift check".to_string()),
            })
        }
        CodesCommand::BuildLp(a) => {
            let am = parse_ring_matrix(a.l, &a.a)?;
            let bm = parse_ring_matrix(a.l, &a.b)?;
            let code = match a.variant {
                LpVariant::Hypergraph => lifted_product(&am, &bm)?,
                LpVariant::Ring => lifted_product_ring(&am, &bm)?,
            };
            let valid = css_valid(&code);
            let distance = distance_mode(a.distance, a.trials, a.seed)
                .map(|m| code.min_distance(m))
                .transpose()?;
            let k = code_dimension(&code);
            let mut body = to_value(&code.to_json(distance.clone()));
            body["css_valid"] = json!(valid);
            body["variant"] = to_value(&a.variant);
            let (rw, cw) = code.max_weights();
            body["max_row_weight"] = json!(rw);
            body["max_col_weight"] = json!(cw);
            Ok(Outcome {
                body,
                pass: valid,
                summary: format!(
                    "[[{}, {k}, {}]]",
                    code.n,
                    distance
                        .and_then(|d| d.value)
                        .map_or("?".to_string(), |v| v.to_string())
                ),
                reason: (!valid).then(|| "H_X · H_Zᵀ ≠ 0".to_string()),
            })
        }
        CodesCommand::Stats(a) => match load_code(a, inputs)? {
            CodeFile::Css(code) => {
                let (rw, cw) = code.max_weights();
                let valid = css_valid(&code);
                let k = code_dimension(&code);
                Ok(Outcome {
                    body: json!({
                        "n": code.n,
                        "k": k,
                        "rank_hx": code.hx.rank(),
                        "rank_hz": code.hz.rank(),
                        "css_valid": valid,
                        "max_row_weight": rw,
                        "max_col_weight": cw,
                    }),
                    pass: valid,
                    summary: format!("n = {}, k = {k}, css_valid {valid}", code.n),
                    reason: (!valid).then(|| "H_X · H_Zᵀ ≠ 0".to_string()),
                })
            }
            CodeFile::Classical(h) => {
                let rank = h.rank();
                Ok(Outcome {
                    body: json!({
                        "n": h.num_cols(),
                        "m": h.num_rows(),
                        "rank": rank,
                        "dimension": h.num_cols() - rank,
                        "max_row_weight": h.max_row_weight(),
                        "max_col_weight": h.max_col_weight(),
                    }),
                    pass: true,
                    summary: format!("[{}, {}]", h.num_cols(), h.num_cols() - rank),
                    reason: None,
                })
            }
        },
        CodesCommand::Distance(a) => {
            let mode =
                distance_mode(a.mode, a.trials, a.seed).ok_or_else(|| Usage("--mode none is not a distance".into()))?;
            let distance = match load_code(&a.file, inputs)? {
                CodeFile::Css(code) => code.min_distance(mode)?,
                CodeFile::Classical(h) => LinearCodeF2::from_parity(h).min_distance(mode)?,
            };
            Ok(Outcome {
                summary: format!("distance {} ({})", shown(distance.value), distance.mode),
                body: to_value(&distance),
                pass: true,
                reason: None,
            })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::GenBase(_) => "gen-base",
        Command::Spectrum(_) => "spectrum",
        Command::LiftSearch(_) => "lift-search",
        Command::Hikes(_) => "hikes",
        Command::Pseudorandom(PseudoCommand::Uniform(_)) => "pseudorandom uniform",
        Command::Pseudorandom(PseudoCommand::Search(_)) => "pseudorandom search",
        Command::Pseudorandom(PseudoCommand::Bias(_)) => "pseudorandom bias",
        Command::Pseudorandom(PseudoCommand::Hoeffding(_)) => "pseudorandom hoeffding",
        Command::Codes(CodesCommand::BuildTanner(_)) => "codes build-tanner",
        Command::Codes(CodesCommand::BuildLp(_)) => "codes build-lp",
        Command::Codes(CodesCommand::Stats(_)) => "codes stats",
        Command::Codes(CodesCommand::Distance(_)) => "codes distance",
    }
}

fn config_of(cmd: &Command) -> Value {
    match cmd {
        Command::GenBase(a) => to_value(a),
        Command::Spectrum(a) => to_value(a),
        Command::LiftSearch(a) => to_value(a),
        Command::Hikes(a) => to_value(a),
        Command::Pseudorandom(PseudoCommand::Uniform(a)) => to_value(a),
        Command::Pseudorandom(PseudoCommand::Search(a)) => to_value(a),
        Command::Pseudorandom(PseudoCommand::Bias(a)) => to_value(a),
        Command::Pseudorandom(PseudoCommand::Hoeffding(a)) => to_value(a),
        Command::Codes(CodesCommand::BuildTanner(a)) => to_value(a),
        Command::Codes(CodesCommand::BuildLp(a)) => to_value(a),
        Command::Codes(CodesCommand::Stats(a)) => to_value(a),
        Command::Codes(CodesCommand::Distance(a)) => to_value(a),
    }
}

fn dispatch(cmd: &Command, inputs: &mut Inputs) -> Run<Outcome> {
    match cmd {
        Command::GenBase(a) => gen_base(a),
        Command::Spectrum(a) => spectrum(a, inputs),
        Command::LiftSearch(a) => lift_search(a, inputs),
        Command::Hikes(a) => hikes(a, inputs),
        Command::Pseudorandom(c) => pseudorandom(c, inputs),
        Command::Codes(c) => codes(c, inputs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let name = command_name(&cli.command);
    let config = config_of(&cli.command);
    let started = Instant::now();
    let mut inputs = Inputs::default();
    let outcome = match dispatch(&cli.command, &mut inputs) {
        Ok(o) => o,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut body = outcome.body;
    if let Value::Object(map) = &mut body {
        map.insert(
            "meta".into(),
            json!({
                "tool": "liftcert",
                "version": env!("CARGO_PKG_VERSION"),
                "command": name,
                "config": config,
                "config_hash": sha256_hex(serde_json::to_string(&config).expect("config serializes").as_bytes()),
                "inputs": inputs.0,
            }),
        );
    }
    let mut text = serde_json::to_string_pretty(&body).expect("artifact serializes");
    text.push('\n');
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        print!("{text}");
    } else {
        println!("{name}: {}", outcome.summary);
    }
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        let report = json!({
            "status": "fail",
            "command": name,
            "reason": outcome.reason.unwrap_or_else(|| "check failed".into()),
        });
        eprintln!("{report}");
        ExitCode::from(1)
    }
}
