use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use edifice::apartment::{
    cochar_approx, enumerate_fan_with, parabolic_key, parabolic_poset, sign_partition, simplicial_witness,
    ApartmentData, FanOptions,
};
use edifice::error::{ApartmentError, GlError, KempfError, MetricError, ParseError};
use edifice::gl::{
    add, common_apartment, include_map, is_opposite, is_point_of, opposite, project_f_pl, project_f_pl_via_limit,
    recover_lambda, act, EdificePoint, UnipotentQuotient,
};
use edifice::io::{load, FlagOpsInput, GroupSpec};
use edifice::kempf::{kempf_optimal, optimal_parabolic, KempfInput, KempfResult};
use edifice::lattice::{format_q, parse_q, CocharVec, QMatrix, Scalar, Q};
use edifice::metrics::{bilipschitz, dist2, AdmissibleMetric};

#[derive(Parser)]
#[command(name = "edifice", version, about = "Vector edifices and parabolic combinatorics over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; csv applies to `fan`, dot to `poset`.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the fan enumeration.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also print decimal approximations of irrational quantities.
    #[arg(long, global = true)]
    approx: bool,
    #[arg(long, global = true, default_value_t = 6)]
    max_rank: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Cells of the weight arrangement with their parabolic keys.
    Fan {
        #[arg(long)]
        input: PathBuf,
    },
    /// The poset of parabolics and whether it is simplicial.
    Poset {
        #[arg(long)]
        input: PathBuf,
    },
    /// Integral cocharacter with the sign pattern of a real one.
    Approx {
        #[arg(long)]
        input: PathBuf,
        /// For example "(1,sqrt2)" or "(1/2,1/3)".
        lambda: String,
    },
    /// Constants `(c, C)` with `c·d² ≤ d′² ≤ C·d²` for the input metric `d`
    /// and a second metric `d′`.
    MetricCompare {
        #[arg(long)]
        input: PathBuf,
        /// Group spec whose `form` is the second metric.
        #[arg(long, conflicts_with = "scale")]
        other: Option<PathBuf>,
        /// Compare with the input metric, distances multiplied by this factor.
        #[arg(long)]
        scale: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Optimal destabilising cocharacter of a torus state.
    Kempf {
        #[arg(long)]
        input: PathBuf,
    },
    /// Operations on points of V_H.
    FlagOps {
        #[arg(value_enum)]
        op: FlagOp,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlagOp {
    Add,
    Oppose,
    Project,
    Common,
    Act,
    Quotient,
    Include,
}

enum Failure {
    Parse(String),
    /// A well-formed answer of "none"; the report is still printed.
    NoResult(Value),
    Other(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::Parse(e.to_string())
    }
}

macro_rules! other_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Failure {
                Failure::Other(e.to_string())
            }
        }
    )*};
}
other_errors!(ApartmentError, GlError, KempfError, MetricError, edifice::lattice::LatticeError);

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::NoResult(v)) => {
            println!("{}", pretty(&v));
            ExitCode::from(3)
        }
        Err(Failure::Parse(e)) => {
            eprintln!("parse error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn json_out(v: Value) -> Outcome {
    Ok(pretty(&v) + "\n")
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Fan { input } => cmd_fan(cli, input),
        Command::Poset { input } => cmd_poset(cli, input),
        Command::Approx { input, lambda } => cmd_approx(cli, input, lambda),
        Command::MetricCompare {
            input,
            other,
            scale,
            samples,
        } => cmd_metric_compare(cli, input, other.as_deref(), scale.as_deref(), *samples),
        Command::Kempf { input } => cmd_kempf(cli, input),
        Command::FlagOps { op, input } => cmd_flag_ops(*op, input),
    }
}

fn load_apartment(path: &Path) -> Result<(GroupSpec, ApartmentData), Failure> {
    let spec: GroupSpec = load(path)?;
    let a = spec.to_apartment()?;
    Ok((spec, a))
}

fn cmd_fan(cli: &Cli, input: &Path) -> Outcome {
    let (_, a) = load_apartment(input)?;
    let fan = enumerate_fan_with(&a, FanOptions { max_rank: cli.max_rank })?;
    let rows: Vec<(String, usize, String, String, String)> = fan
        .cells
        .iter()
        .map(|c| {
            let key = c.pattern.key();
            let label = a.label_of(&key.geq0).unwrap_or("").to_string();
            (c.pattern.compact(), c.dim, c.witness.to_string(), format!("{:?}", key.geq0), label)
        })
        .collect();
    match cli.format {
        OutputFormat::Csv => {
            let mut s = String::from("pattern,dim,witness,geq0,label\n");
            for (p, d, w, g, l) in &rows {
                s.push_str(&format!("{p},{d},\"{w}\",\"{g}\",{l}\n"));
            }
            Ok(s)
        }
        OutputFormat::Dot => Err(Failure::Other("fan has no DOT output".into())),
        OutputFormat::Json => {
            let cells: Vec<Value> = fan
                .cells
                .iter()
                .zip(&rows)
                .map(|(c, (p, d, w, _, l))| {
                    let key = c.pattern.key();
                    json!({
                        "pattern": p,
                        "dim": d,
                        "witness": w,
                        "key": { "geq0": key.geq0, "zero": key.zero },
                        "label": if l.is_empty() { Value::Null } else { json!(l) },
                    })
                })
                .collect();
            json_out(json!({
                "group": a.name(),
                "rank": a.rank(),
                "cells": cells,
                "keys": fan.key_index.len(),
                "parabolics": fan.parabolic_classes().len(),
                "chambers": fan.chambers(a.rank()).len(),
            }))
        }
    }
}

fn cmd_poset(cli: &Cli, input: &Path) -> Outcome {
    let (_, a) = load_apartment(input)?;
    let fan = enumerate_fan_with(&a, FanOptions { max_rank: cli.max_rank })?;
    let p = parabolic_poset(&a, &fan);
    let witness = simplicial_witness(&p);
    match cli.format {
        OutputFormat::Dot => Ok(p.to_dot(a.name())),
        OutputFormat::Csv => Err(Failure::Other("poset has no CSV output".into())),
        OutputFormat::Json => {
            let nodes: Vec<Value> = (0..p.nodes.len())
                .map(|i| {
                    json!({
                        "name": p.node_name(i),
                        "geq0": p.nodes[i].geq0,
                        "minimal_elements": p.minimal_elements[i].iter().map(|&j| p.node_name(j)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_out(json!({
                "group": a.name(),
                "nodes": nodes,
                "hasse": p.hasse.iter().map(|&(i, j)| [p.node_name(i), p.node_name(j)]).collect::<Vec<_>>(),
                "simplicial": witness.is_none(),
                "witness": witness.map(|(i, j)| [p.node_name(i), p.node_name(j)]),
            }))
        }
    }
}

fn cmd_approx(cli: &Cli, input: &Path, lambda: &str) -> Outcome {
    let (_, a) = load_apartment(input)?;
    let l: CocharVec = lambda.parse()?;
    let approx = cochar_approx(&a, &l)?;
    let signs = sign_partition(&a, &l)?;
    let mut out = json!({
        "input": l.to_string(),
        "approximation": approx.to_string(),
        "signs": signs.compact(),
        "signs_match": sign_partition(&a, &approx)? == signs,
        "key": parabolic_key(&a, &l)?,
    });
    if cli.approx {
        out["decimal"] = json!(l.coords.iter().map(Scalar::approx).collect::<Vec<f64>>());
    }
    json_out(out)
}

fn form_of(spec: &GroupSpec, a: &ApartmentData) -> Result<AdmissibleMetric, Failure> {
    Ok(match spec.form()? {
        Some(f) => AdmissibleMetric::base(f),
        None => AdmissibleMetric::standard(a),
    })
}

fn cmd_metric_compare(cli: &Cli, input: &Path, other: Option<&Path>, scale: Option<&str>, samples: usize) -> Outcome {
    let (spec, a) = load_apartment(input)?;
    let d1 = form_of(&spec, &a)?;
    let d2 = match (other, scale) {
        (Some(p), _) => {
            let (s2, a2) = load_apartment(p)?;
            if a2.rank() != a.rank() {
                return Err(Failure::Other(format!("ranks differ: {} and {}", a.rank(), a2.rank())));
            }
            form_of(&s2, &a2)?
        }
        (None, Some(s)) => {
            let f = parse_q(s).ok_or_else(|| Failure::Parse(format!("bad scale {s:?}")))?;
            d1.scaled(&(&f * &f))?
        }
        (None, None) => d1.clone(),
    };
    // c·d₁² ≤ d₂² ≤ C·d₁² with d₁ the input metric.
    let (c, cc) = bilipschitz(&d2, &d1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut ok = 0;
    for _ in 0..samples {
        let x = random_cochar(&mut rng, a.rank());
        let y = random_cochar(&mut rng, a.rank());
        let s1 = dist2(&d1, &x, &y)?;
        let s2 = dist2(&d2, &x, &y)?;
        let (Some(s1), Some(s2)) = (s1.as_rational(), s2.as_rational()) else {
            continue;
        };
        if &c * s1 <= *s2 && *s2 <= &cc * s1 {
            ok += 1;
        }
    }
    let mut out = json!({
        "c": format_q(&c),
        "C": format_q(&cc),
        "samples": samples,
        "within_bounds": ok,
    });
    if cli.approx {
        out["c_decimal"] = json!(to_f64(&c));
        out["C_decimal"] = json!(to_f64(&cc));
    }
    json_out(out)
}

fn to_f64(x: &Q) -> f64 {
    Scalar::rational(x.clone()).approx()
}

fn random_cochar(rng: &mut ChaCha8Rng, rank: usize) -> CocharVec {
    CocharVec::ints(&(0..rank).map(|_| rng.gen_range(-9..=9)).collect::<Vec<i64>>())
}

fn cmd_kempf(cli: &Cli, input: &Path) -> Outcome {
    let spec: KempfInput = load(input)?;
    let (action, x, metric) = spec.build()?;
    match kempf_optimal(&action, &x, &metric)? {
        KempfResult::Semistable => Err(Failure::NoResult(json!({ "semistable": true }))),
        KempfResult::Optimal(o) => {
            let par = optimal_parabolic(&action, &x, &o.lambda_opt)?;
            let mut out = json!({
                "semistable": false,
                "lambda_opt": o.lambda_opt.to_string(),
                "value_sq": format_q(&o.value_sq),
                "parabolic_key": par.key,
                "unopposed": par.unopposed,
                "kkt_verified": o.certificate.verify_kkt(
                    &x.support().iter().map(|&i| action.weights()[i].clone()).collect::<Vec<_>>(),
                    &metric.form,
                ),
            });
            if cli.approx {
                out["value_sq_decimal"] = json!(to_f64(&o.value_sq));
            }
            json_out(out)
        }
    }
}

fn point_json(x: &EdificePoint) -> Value {
    json!({
        "group": x.group().name(),
        "flag": serde_json::to_value(x.flag()).expect("flags serialize"),
        "type": x.flag().type_vector().iter().map(format_q).collect::<Vec<_>>(),
    })
}

fn matrix_json(m: &QMatrix) -> Value {
    serde_json::to_value(m).expect("matrices serialize")
}

fn cmd_flag_ops(op: FlagOp, input: &Path) -> Outcome {
    let spec: FlagOpsInput = load(input)?;
    let h = &spec.group;
    let points: Vec<EdificePoint> = spec
        .points
        .iter()
        .map(|p| p.to_point(h))
        .collect::<Result<_, _>>()?;
    let need = |k: usize| -> Result<(), Failure> {
        if points.len() < k {
            return Err(Failure::Parse(format!("this operation needs {k} points, found {}", points.len())));
        }
        Ok(())
    };
    match op {
        FlagOp::Add => {
            need(2)?;
            match add(&points[0], &points[1]) {
                Ok(s) => json_out(json!({ "sum": point_json(&s) })),
                Err(GlError::NoCommonApartment) => Err(Failure::NoResult(json!({ "sum": "none" }))),
                Err(e) => Err(e.into()),
            }
        }
        FlagOp::Common => {
            need(2)?;
            match common_apartment(&points[0], &points[1])? {
                Some(sb) => json_out(json!({ "apartment": matrix_json(&sb.basis) })),
                None => Err(Failure::NoResult(json!({ "apartment": "none" }))),
            }
        }
        FlagOp::Oppose => {
            need(1)?;
            if points.len() >= 2 {
                let opp = is_opposite(&points[0], &points[1])?;
                let lambda = if opp {
                    serde_json::to_value(recover_lambda(&points[0], &points[1])?).expect("serialize")
                } else {
                    Value::Null
                };
                return json_out(json!({ "opposite": opp, "lambda": lambda }));
            }
            let basis = match &spec.matrix {
                Some(m) => m.clone(),
                None => is_point_of(h, points[0].flag())?.expect("points of V_H have apartments").basis,
            };
            let o = opposite(&points[0], &basis)?;
            json_out(json!({ "apartment": matrix_json(&basis), "opposite": point_json(&o) }))
        }
        FlagOp::Act => {
            need(1)?;
            let g = spec
                .matrix
                .as_ref()
                .ok_or_else(|| Failure::Parse("act needs `matrix`".into()))?;
            h.require(g)?;
            let out: Vec<Value> = points
                .iter()
                .map(|x| act(g, x).map(|y| point_json(&y)))
                .collect::<Result<_, _>>()?;
            json_out(json!({ "images": out }))
        }
        FlagOp::Project => {
            need(1)?;
            let lambda = spec
                .lambda
                .as_ref()
                .ok_or_else(|| Failure::Parse("project needs `lambda`".into()))?;
            let mut out = Vec::new();
            for x in &points {
                let p = project_f_pl(h, lambda, x)?;
                let check = project_f_pl_via_limit(h, lambda, x)?;
                out.push(json!({ "image": point_json(&p), "limit_recipe_agrees": &check == p.flag() }));
            }
            json_out(json!({ "projections": out }))
        }
        FlagOp::Quotient => {
            need(1)?;
            let kept = spec
                .kept
                .as_ref()
                .ok_or_else(|| Failure::Parse("quotient needs `kept`".into()))?;
            let q = UnipotentQuotient::new(h, kept)?;
            let images: Vec<Value> = points
                .iter()
                .map(|x| q.map_point(x).map(|y| point_json(&y)))
                .collect::<Result<_, _>>()?;
            let mut out = json!({ "quotient": q.quotient().name(), "images": images });
            if points.len() >= 2 {
                out["same_image"] = json!(q.map_point(&points[0])? == q.map_point(&points[1])?);
                out["fiber_witness"] = match q.fiber_witness(&points[0], &points[1])? {
                    Some(n) => matrix_json(&n),
                    None => json!("none"),
                };
            }
            json_out(out)
        }
        FlagOp::Include => {
            need(1)?;
            let target = spec
                .target
                .as_ref()
                .ok_or_else(|| Failure::Parse("include needs `target`".into()))?;
            let inc: Vec<EdificePoint> = points
                .iter()
                .map(|x| include_map(target, x))
                .collect::<Result<_, _>>()?;
            let mut out = json!({
                "target": target.name(),
                "images": inc.iter().map(point_json).collect::<Vec<_>>(),
            });
            if inc.len() >= 2 {
                out["source_apartment"] = match common_apartment(&points[0], &points[1])? {
                    Some(sb) => matrix_json(&sb.basis),
                    None => json!("none"),
                };
                out["target_apartment"] = match common_apartment(&inc[0], &inc[1])? {
                    Some(sb) => matrix_json(&sb.basis),
                    None => json!("none"),
                };
            }
            json_out(out)
        }
    }
}
