//! `flagforge`: emits atlas, transition and soft-scheme data as JSON and runs
//! the verification sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use flagforge::exactring::{parse_expr, LocalizedElement, MasterRing, Polynomial};
use flagforge::flagcomb::{enumerate_sequences, sequence_count, AdmissibleChain, AdmissibleSequence, FlagType};
use flagforge::flagmatrix::Atlas;
use flagforge::freealg::{lift, LiftConvention, NCPolynomial};
use flagforge::serial::{
    chain_to_json, envelope, flag_type_to_json, localized_from_json, localized_to_json, matrix_to_json, nc_to_json,
    poly_from_json, poly_to_json, sequence_to_json, to_canonical_string,
};
use flagforge::softscheme::{
    build_soft_scheme, hypersurface_subscheme, plucker_pullback, plucker_registry, plucker_slots, soften_union,
    verify_soft_scheme, SoftScheme, SoftSchemeReport, SubschemeReport, Violation,
};
use flagforge::verify::{self, VerifyOptions};

#[derive(Parser)]
#[command(name = "flagforge", version, about = "Exact atlases and soft noncommutative schemes of flag varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flag dimensions, comma separated (e.g. `2` or `1,2`).
    #[arg(long)]
    d: String,
    /// Ambient dimension.
    #[arg(long)]
    n: usize,
    /// Write JSON here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible sequences, their count and the dimension.
    Atlas(Common),
    /// Variables and the table of inverted minors.
    MasterRing(Common),
    /// Transition data between two charts.
    Transition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Realization matrix and generator set of a chart.
    Realize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chart: String,
    },
    /// Checks the cocycle condition on chart triples.
    VerifyCocycle {
        #[command(flatten)]
        common: Common,
        /// All ordered triples instead of those starting at the reference chart.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Builds and verifies the lifted soft scheme.
    SoftScheme {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "inverse-first")]
        convention: String,
    },
    /// Softens the two lifting conventions into one scheme.
    Soften(Common),
    /// Lifts a master-ring element given as JSON or as an expression.
    Lift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        expr: PathBuf,
        #[arg(long, default_value = "inverse-first")]
        convention: String,
    },
    /// Pulls a form in the Plücker variables back to a chart.
    Plucker {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        chart: String,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Closed subscheme cut out by a Plücker hypersurface.
    Subscheme {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hypersurface: PathBuf,
        #[arg(long, default_value = "inverse-first")]
        convention: String,
    },
    /// Runs the invariant sweeps and reports each check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Exhaustive cocycle triples.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// JSON payload plus whether every check in it passed.
struct Outcome {
    body: Value,
    passed: bool,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { body, passed: true }
    }
}

fn flag_type(c: &Common) -> Result<FlagType> {
    let dims = c
        .d
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow!("--d expects comma-separated integers, got `{}`", c.d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FlagType::new(dims, c.n)?)
}

fn sequence(ft: &FlagType, text: &str) -> Result<AdmissibleSequence> {
    AdmissibleSequence::parse(ft, text).with_context(|| format!("chart `{text}`"))
}

fn convention(text: &str) -> Result<LiftConvention> {
    Ok(LiftConvention::parse(text)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn elements(v: &[LocalizedElement]) -> Value {
    Value::Array(v.iter().map(localized_to_json).collect())
}

fn displays<T: ToString>(v: &[T]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn nc_list(v: &[NCPolynomial]) -> Value {
    Value::Array(v.iter().map(nc_to_json).collect())
}

fn violations_json(v: &[Violation]) -> Value {
    Value::Array(v.iter().map(|x| json!({ "condition": x.condition, "chain": x.chain, "detail": x.detail })).collect())
}

fn soft_report_json(r: &SoftSchemeReport) -> Value {
    json!({
        "chains_checked": r.chains_checked,
        "inclusions_checked": r.inclusions_checked,
        "passed": r.passed(),
        "violations": violations_json(&r.violations),
    })
}

fn subscheme_report_json(r: &SubschemeReport) -> Value {
    json!({ "chains_checked": r.chains_checked, "passed": r.passed(), "violations": violations_json(&r.violations) })
}

fn scheme_charts(s: &SoftScheme) -> Value {
    Value::Array(
        s.atlas()
            .sequences()
            .iter()
            .map(|seq| {
                let g = s.chart_generators(seq);
                json!({
                    "chart": sequence_to_json(seq),
                    "commutative": elements(s.system().chart_generators(seq)),
                    "lifted": nc_list(g),
                    "display": displays(g),
                })
            })
            .collect(),
    )
}

/// JSON term list, an element object, a JSON string, or a bare expression.
fn parse_element(text: &str, ring: &Arc<MasterRing>) -> Result<LocalizedElement> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::String(s)) => Ok(ring.parse(&s)?),
        Ok(v @ Value::Object(_)) => {
            let v = v.get("element").cloned().unwrap_or(v);
            Ok(localized_from_json(&v, ring)?)
        }
        Ok(v @ Value::Array(_)) => Ok(ring.from_poly(poly_from_json(&v, ring.registry())?)?),
        Ok(_) => bail!("expected an element object, a term list or an expression"),
        Err(_) => Ok(ring.parse(text.trim())?),
    }
}

fn parse_plucker_form(text: &str, ft: &FlagType) -> Result<Polynomial> {
    let reg = plucker_registry(ft)?;
    match serde_json::from_str::<Value>(text) {
        Ok(Value::String(s)) => Ok(parse_expr(&s)?.eval_poly(&reg)?),
        Ok(Value::Object(m)) => {
            let terms = m.get("polynomial").ok_or_else(|| anyhow!("object needs a `polynomial` field"))?;
            Ok(poly_from_json(terms, &reg)?)
        }
        Ok(v @ Value::Array(_)) => Ok(poly_from_json(&v, &reg)?),
        Ok(_) => bail!("expected a term list or an expression"),
        Err(_) => Ok(parse_expr(text.trim())?.eval_poly(&reg)?),
    }
}

fn run(command: Command) -> Result<(Outcome, Option<PathBuf>)> {
    let (common, outcome) = match command {
        Command::Atlas(c) => {
            let ft = flag_type(&c)?;
            let seqs = enumerate_sequences(&ft);
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "dimension": ft.dimension(),
                "sequence_count": sequence_count(&ft).to_string(),
                "sequences": seqs.iter().map(sequence_to_json).collect::<Vec<_>>(),
                "maximal_chain": chain_to_json(&AdmissibleChain::maximal(&ft)),
            });
            (c, Outcome::ok(body))
        }
        Command::MasterRing(c) => {
            let ft = flag_type(&c)?;
            let ring = MasterRing::new(&ft);
            let minors: Vec<Value> = ring
                .minors()
                .iter()
                .map(|m| {
                    json!({
                        "name": m.id.name(),
                        "level": m.level,
                        "columns": m.columns,
                        "polynomial": poly_to_json(&m.poly),
                        "display": m.poly.to_string(),
                    })
                })
                .collect();
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "variables": ring.registry().names(),
                "minors": minors,
            });
            (c, Outcome::ok(body))
        }
        Command::Transition { common, from, to } => {
            let ft = flag_type(&common)?;
            let atlas = Atlas::new(&ft);
            let t = atlas.transition(&sequence(&ft, &from)?, &sequence(&ft, &to)?)?;
            let body = json!({
                "from": sequence_to_json(&t.from),
                "to": sequence_to_json(&t.to),
                "c": matrix_to_json(&t.c),
                "result": matrix_to_json(&t.result),
                "coordinates": elements(&t.coordinates),
                "display": displays(&t.coordinates),
            });
            (common, Outcome::ok(body))
        }
        Command::Realize { common, chart } => {
            let ft = flag_type(&common)?;
            let atlas = Atlas::new(&ft);
            let seq = sequence(&ft, &chart)?;
            let (m, g) = atlas.master_realization(&seq)?;
            let rows: Vec<Value> = m.entries().iter().map(|r| displays(r)).collect();
            let body = json!({
                "chart": sequence_to_json(&seq),
                "matrix": matrix_to_json(&m),
                "display": rows,
                "generators": elements(&g),
            });
            (common, Outcome::ok(body))
        }
        Command::VerifyCocycle { common, exhaustive } => {
            let ft = flag_type(&common)?;
            let atlas = Atlas::new(&ft);
            let triples = verify::cocycle_triples(&ft, exhaustive);
            let failing = atlas.verify_cocycles(&triples)?;
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "exhaustive": exhaustive,
                "triples_checked": triples.len(),
                "failures": failing.iter().map(|(i, j, k)| json!([i.label(), j.label(), k.label()])).collect::<Vec<_>>(),
                "passed": failing.is_empty(),
            });
            (common, Outcome { body, passed: failing.is_empty() })
        }
        Command::SoftScheme { common, convention: conv } => {
            let ft = flag_type(&common)?;
            let s = build_soft_scheme(&ft, convention(&conv)?)?;
            let report = verify_soft_scheme(&s);
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "convention": s.convention().name(),
                "charts": scheme_charts(&s),
                "report": soft_report_json(&report),
            });
            (common, Outcome { body, passed: report.passed() })
        }
        Command::Soften(c) => {
            let ft = flag_type(&c)?;
            let a = build_soft_scheme(&ft, LiftConvention::InverseFirst)?;
            let b = SoftScheme::lifted(a.system(), LiftConvention::InverseLast);
            let u = soften_union(&a, &b)?;
            let report = verify_soft_scheme(&u);
            let softens = u.softens(&a) && u.softens(&b);
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "conventions": [a.convention().name(), b.convention().name()],
                "charts": scheme_charts(&u),
                "softens_inputs": softens,
                "report": soft_report_json(&report),
            });
            (c, Outcome { body, passed: softens && report.passed() })
        }
        Command::Lift { common, expr, convention: conv } => {
            let ft = flag_type(&common)?;
            let ring = MasterRing::new(&ft);
            let e = parse_element(&read(&expr)?, &ring)?;
            let conv = convention(&conv)?;
            let lifted = lift(&e, conv);
            let back = lifted.commutatize();
            let round_trip = back == e;
            let body = json!({
                "convention": conv.name(),
                "element": localized_to_json(&e),
                "element_display": e.to_string(),
                "lifted": nc_to_json(&lifted),
                "lifted_display": lifted.to_string(),
                "commutatized": localized_to_json(&back),
                "round_trip": round_trip,
            });
            (common, Outcome { body, passed: round_trip })
        }
        Command::Plucker { common, chart, poly } => {
            let ft = flag_type(&common)?;
            let atlas = Atlas::new(&ft);
            let seq = sequence(&ft, &chart)?;
            let f = parse_plucker_form(&read(&poly)?, &ft)?;
            let slots = plucker_slots(&atlas, &seq)?;
            let pulled = plucker_pullback(&atlas, &f, &seq)?;
            let body = json!({
                "chart": sequence_to_json(&seq),
                "polynomial": poly_to_json(&f),
                "slots": elements(&slots),
                "slots_display": displays(&slots),
                "pullback": localized_to_json(&pulled),
                "pullback_display": pulled.to_string(),
            });
            (common, Outcome::ok(body))
        }
        Command::Subscheme { common, hypersurface, convention: conv } => {
            let ft = flag_type(&common)?;
            let f = parse_plucker_form(&read(&hypersurface)?, &ft)?;
            let s = build_soft_scheme(&ft, convention(&conv)?)?;
            let z = hypersurface_subscheme(&s, &f)?;
            let report = z.verify();
            let charts: Vec<Value> = z
                .charts()
                .map(|(seq, c)| {
                    json!({
                        "chart": sequence_to_json(seq),
                        "commutative": elements(&c.commutative),
                        "lifted": nc_list(&c.lifted),
                        "display": displays(&c.lifted),
                    })
                })
                .collect();
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "polynomial": poly_to_json(&f),
                "convention": s.convention().name(),
                "charts": charts,
                "report": subscheme_report_json(&report),
            });
            (common, Outcome { body, passed: report.passed() })
        }
        Command::Verify { common, all, samples, seed } => {
            let ft = flag_type(&common)?;
            let report = verify::run_all(&ft, VerifyOptions { exhaustive_cocycle: all, samples, seed })?;
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "cases": c.cases, "detail": c.detail }))
                .collect();
            let body = json!({
                "flag_type": flag_type_to_json(&ft),
                "exhaustive": all,
                "checks": checks,
                "passed": report.passed(),
            });
            (common, Outcome { body, passed: report.passed() })
        }
    };
    Ok((outcome, common.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    flagforge::par::configure_from_env();
    match run(cli.command) {
        Ok((outcome, output)) => {
            let text = to_canonical_string(&envelope(outcome.body));
            let written = match &output {
                Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
