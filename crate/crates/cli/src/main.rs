//! Command-line interface: validation, factorization, class checks, both
//! composition routes, reflection, the canonical comparison, and the seeded
//! property audit. Results go to standard output as JSON; diagnostics go to
//! standard error. Exit codes: 0 success/pass, 1 counterexample or failed
//! check, 2 malformed input or configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use relators::audit::{run_audit, AuditConfig, Property};
use relators::dist::{check_dfib_into_product, check_opfib_into_product, check_two_sided};
use relators::factor::{
    comprehensive_factorization, is_discrete_fibration, is_discrete_opfibration, is_final,
};
use relators::json::{
    parse_document, DistributorDoc, Document, FactorizationDoc, MapsDoc, SpanDoc,
};
use relators::tensor::{
    canonical_comparison, compose_distributors, compose_spans, reflect_span, ComposablePair,
};

#[derive(Parser)]
#[command(
    name = "relators",
    version,
    about = "Finite groupoids, distributors and the comprehensive factorization system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSON document (groupoid, functor, distributor, span or
    /// internal structure) and report its kind and sizes.
    Validate { file: PathBuf },
    /// Factor a functor as a final functor followed by a discrete fibration.
    Factorize { file: PathBuf },
    /// Run a class-membership check on a functor or span.
    Check {
        /// Final functor check (comma categories non-empty and connected).
        #[arg(long = "final")]
        final_check: bool,
        /// Discrete fibration check (unique lifts at codomains).
        #[arg(long)]
        dfib: bool,
        /// Discrete opfibration check.
        #[arg(long)]
        opfib: bool,
        /// Discrete two-sided fibration check on a span.
        #[arg(long = "two-sided")]
        two_sided: bool,
        file: PathBuf,
    },
    /// Compose two spans (pullback) or two distributors (coend quotient).
    Compose {
        /// Compose spans by strict pullback.
        #[arg(long)]
        span: bool,
        /// Compose distributors by the coend quotient.
        #[arg(long)]
        dist: bool,
        first: PathBuf,
        second: PathBuf,
    },
    /// Reflect a span into a distributor through the comprehensive
    /// factorization; outputs the distributor and the final unit.
    Reflect { file: PathBuf },
    /// Certify that the coend composite of two distributors agrees with the
    /// reflected span composite.
    Compare { first: PathBuf, second: PathBuf },
    /// Run the seeded property audit and print a deterministic report.
    Audit {
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_objects: usize,
        #[arg(long, default_value_t = 4)]
        max_arrows_per_hom: usize,
        #[arg(long, default_value_t = 4)]
        max_fiber: usize,
        /// Base instance: finset, gset:z2, gset:z3, gset:v4 or gset:s3.
        #[arg(long, default_value = "finset")]
        base: String,
        /// Property names to run; defaults to all.
        #[arg(long = "property")]
        properties: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_document(path: &Path) -> Result<Document, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_document(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Validate { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            match parse_document(&text) {
                Ok(doc) => {
                    emit(&json!({
                        "valid": true,
                        "kind": doc.kind(),
                        "summary": summary(&doc),
                    }));
                    Ok(ExitCode::SUCCESS)
                }
                Err(relators::json::JsonError::Parse(e)) => Err(format!("malformed json: {e}")),
                Err(e) => {
                    emit(&json!({ "valid": false, "error": e.to_string() }));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Factorize { file } => {
            let Document::Functor(f) = read_document(&file)? else {
                return Err("factorize expects a functor document".into());
            };
            let fact = comprehensive_factorization(&f);
            emit(&serde_json::to_value(FactorizationDoc::of(&fact)).expect("serializable"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            final_check,
            dfib,
            opfib,
            two_sided,
            file,
        } => {
            let picked = [final_check, dfib, opfib, two_sided]
                .iter()
                .filter(|&&b| b)
                .count();
            if picked != 1 {
                return Err("pick exactly one of --final, --dfib, --opfib, --two-sided".into());
            }
            let doc = read_document(&file)?;
            let (name, holds, witness) = match (doc, final_check, dfib, opfib, two_sided) {
                (Document::Functor(f), true, _, _, _) => {
                    let check = is_final(&f);
                    ("final", check.holds(), witness_json(&check))
                }
                (Document::Functor(f), _, true, _, _) => {
                    let check = is_discrete_fibration(&f);
                    ("dfib", check.holds(), witness_json(&check))
                }
                (Document::Functor(f), _, _, true, _) => {
                    let check = is_discrete_opfibration(&f);
                    ("opfib", check.holds(), witness_json(&check))
                }
                (Document::Span(span), _, _, _, true) => {
                    let check = check_two_sided(&span);
                    let dfib_prod = check_dfib_into_product(&span).holds();
                    let opfib_prod = check_opfib_into_product(&span).holds();
                    let value = json!({
                        "check": "two-sided",
                        "holds": check.holds(),
                        "witness": witness_json(&check),
                        "dfib_into_product": dfib_prod,
                        "opfib_into_product": opfib_prod,
                    });
                    emit(&value);
                    return Ok(if check.holds() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    });
                }
                _ => return Err("check flag does not match the document kind".into()),
            };
            emit(&json!({ "check": name, "holds": holds, "witness": witness }));
            Ok(if holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Compose {
            span,
            dist,
            first,
            second,
        } => {
            if span == dist {
                return Err("pick exactly one of --span, --dist".into());
            }
            if span {
                let (Document::Span(s1), Document::Span(s2)) =
                    (read_document(&first)?, read_document(&second)?)
                else {
                    return Err("compose --span expects two span documents".into());
                };
                let composite = compose_spans(&s1, &s2).map_err(|e| e.to_string())?;
                emit(&serde_json::to_value(SpanDoc::of(&composite.span)).expect("serializable"));
            } else {
                let (Document::Distributor(d1), Document::Distributor(d2)) =
                    (read_document(&first)?, read_document(&second)?)
                else {
                    return Err("compose --dist expects two distributor documents".into());
                };
                let pair = ComposablePair::new(d1, d2).map_err(|e| e.to_string())?;
                let composite = compose_distributors(&pair);
                emit(&serde_json::to_value(DistributorDoc::of(&composite)).expect("serializable"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reflect { file } => {
            let Document::Span(span) = read_document(&file)? else {
                return Err("reflect expects a span document".into());
            };
            let reflection = reflect_span(&span);
            let unit_final = is_final(&reflection.unit).holds();
            emit(&json!({
                "distributor": DistributorDoc::of(&reflection.distributor),
                "unit": MapsDoc::of(&reflection.unit),
                "unit_is_final": unit_final,
                "factorization": FactorizationDoc::of(&reflection.factorization),
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { first, second } => {
            let (Document::Distributor(d1), Document::Distributor(d2)) =
                (read_document(&first)?, read_document(&second)?)
            else {
                return Err("compare expects two distributor documents".into());
            };
            let pair = ComposablePair::new(d1, d2).map_err(|e| e.to_string())?;
            match canonical_comparison(&pair) {
                Ok(verdict) => {
                    emit(&serde_json::to_value(&verdict).expect("serializable"));
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    emit(&json!({ "bijective": false, "error": e.to_string() }));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Audit {
            trials,
            seed,
            max_objects,
            max_arrows_per_hom,
            max_fiber,
            base,
            properties,
        } => {
            let mut parsed = Vec::new();
            for name in &properties {
                match Property::parse(name) {
                    Some(p) => parsed.push(p),
                    None => return Err(format!("unknown property '{name}'")),
                }
            }
            let config = AuditConfig {
                seed,
                trials,
                max_objects,
                max_arrows_per_hom,
                max_fiber,
                base,
                properties: parsed,
            };
            let report = run_audit(&config).map_err(|e| e.to_string())?;
            for prop in &report.properties {
                eprintln!(
                    "{}: {}/{} passed in {} ms",
                    prop.property, prop.passes, prop.trials, prop.millis
                );
            }
            emit(&serde_json::to_value(&report).expect("serializable"));
            Ok(if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn witness_json<W: std::fmt::Debug>(check: &relators::verdict::Check<W>) -> serde_json::Value {
    match check.witness() {
        Some(w) => json!(format!("{w:?}")),
        None => serde_json::Value::Null,
    }
}

fn summary(doc: &Document) -> serde_json::Value {
    match doc {
        Document::Groupoid(g) => json!({
            "objects": g.n_objects(),
            "arrows": g.n_arrows(),
            "components": g.pi0().blocks.len(),
        }),
        Document::Functor(f) => json!({
            "source_objects": f.source().n_objects(),
            "target_objects": f.target().n_objects(),
        }),
        Document::Distributor(d) => json!({
            "elements": d.n_elements(),
        }),
        Document::Span(s) => json!({
            "apex_objects": s.apex().n_objects(),
            "apex_arrows": s.apex().n_arrows(),
        }),
        Document::InternalGroupoid(g) => json!({
            "objects": g.c0().size(),
            "arrows": g.c1().size(),
        }),
        Document::InternalDistributor(d) => json!({
            "carrier": d.s0().size(),
        }),
    }
}
