//! `pachner33`: generate, convert and verify weights and cocycles.
//!
//! All randomness comes from one ChaCha8 generator seeded with `--seed`.
//! JSON output has sorted keys and 17 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use pachner_core::acceptance::{run_all, AcceptanceConfig};
use pachner_core::edgeops::{extract_w_cocycle, normalize_family};
use pachner_core::elliptic::{elliptic_cocycle, elliptic_f};
use pachner_core::json;
use pachner_core::pachner::{reconcile_with, report, Tolerances};
use pachner_core::sampling::{random_cocycle, random_elliptic_coords, random_elliptic_params, random_weight_matrix};
use pachner_core::simplicial::{cocycle_residual, simplex_of_cochain};
use pachner_core::{Cochain, EllipticParams, Simplex4, SimplexComplex, Vertex, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

const SIX: [Vertex; 6] = [1, 2, 3, 4, 5, 6];

#[derive(Parser)]
#[command(name = "pachner33", version, about = "Grassmann weights on simplices and the Pachner 3–3 move")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed of the random generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual threshold deciding the exit code.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build Ω on the boundary of the 5-simplex, reconcile the six weights
    /// and compare both sides of the 3–3 move.
    VerifyPachner {
        /// Use the elliptic family instead of a random coboundary.
        #[arg(long)]
        elliptic: bool,
        /// Elliptic modulus `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        modulus: Option<C64>,
        /// Elliptic coordinates file.
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Cocycle file on the vertices 1..6.
        #[arg(long, conflicts_with_all = ["elliptic", "modulus", "coords"])]
        cocycle: Option<PathBuf>,
        /// Evaluate seeds `seed..seed+N` in parallel.
        #[arg(long)]
        batch: Option<u64>,
    },
    /// Gauge-fixed F from a cocycle on one 4-simplex.
    WeightFromCocycle {
        #[arg(long)]
        cocycle: PathBuf,
    },
    /// Normalized W-cocycle of an F file.
    CocycleFromWeight {
        /// F file.
        input: PathBuf,
    },
    /// Normalized edge operators of an F file, or of a random F.
    EdgeOperators {
        /// F file; a random F on 12345 when absent.
        input: Option<PathBuf>,
    },
    /// Elliptic F on one 4-simplex.
    EllipticF {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        modulus: Option<C64>,
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Simplex as `1,2,3,4,5`; defaults to the first five coordinates.
        #[arg(long, value_parser = parse_simplex)]
        simplex: Option<Simplex4>,
    },
    /// Runs the acceptance suite and prints one line per criterion.
    Selftest,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => {
            let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
            let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
            Ok(C64::new(re, im))
        }
        _ => Err(format!("expected re,im but got {s:?}")),
    }
}

fn parse_simplex(s: &str) -> Result<Simplex4, String> {
    let v = json::parse_key(s).map_err(|e| e.to_string())?;
    let n = v.len();
    v.try_into().map_err(|_| format!("a 4-simplex has 5 vertices, got {n}"))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(common: &Common, v: &Value) -> anyhow::Result<()> {
    let mut text = json::to_string(v);
    text.push('\n');
    match &common.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn error_json(e: &pachner_core::Error) -> Value {
    json!({"kind": e.kind(), "message": e.to_string()})
}

#[derive(Clone)]
enum Source {
    Random,
    Elliptic { modulus: Option<C64>, coords: Option<BTreeMap<Vertex, C64>> },
    File(Cochain),
}

fn elliptic_params(rng: &mut ChaCha8Rng, modulus: Option<C64>, coords: Option<&BTreeMap<Vertex, C64>>, vertices: &[Vertex]) -> anyhow::Result<EllipticParams> {
    Ok(match (modulus, coords) {
        (Some(k), Some(c)) => EllipticParams::new(k, c.clone())?,
        (None, Some(_)) => bail!("--coords needs --modulus (or a coordinates file with a modulus field)"),
        (Some(k), None) => random_elliptic_coords(rng, vertices, k).context("no admissible coordinates found for this modulus")?,
        (None, None) => random_elliptic_params(rng, vertices),
    })
}

/// `(passed, report)` for one seed.
fn verify_one(source: &Source, seed: u64, tol: f64) -> anyhow::Result<(bool, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cx = SimplexComplex::boundary_of_5_simplex(SIX)?;
    let (omega, origin) = match source {
        Source::Random => (random_cocycle(&mut rng, &cx), json!({"kind": "random"})),
        Source::Elliptic { modulus, coords } => {
            let p = elliptic_params(&mut rng, *modulus, coords.as_ref(), &SIX)?;
            (elliptic_cocycle(&p, &cx)?, json!({"kind": "elliptic", "params": json::elliptic_to_json(&p)}))
        }
        Source::File(c) => (c.clone(), json!({"kind": "file"})),
    };
    let tolerances = Tolerances {
        end_to_end: tol,
        ..Tolerances::default()
    };
    let outcome = reconcile_with(&omega, tolerances).and_then(|rw| report(&rw));
    let mut out = json!({"seed": seed, "tolerance": json::float(tol), "source": origin});
    let passed = match outcome {
        Ok(rep) => {
            let ok = rep.passes(tol);
            let body = json::report_to_json(&rep);
            for (k, v) in body.as_object().expect("report is an object") {
                out[k] = v.clone();
            }
            ok
        }
        Err(e) => {
            out["error"] = error_json(&e);
            false
        }
    };
    out["passed"] = json!(passed);
    Ok((passed, out))
}

fn load_coords(path: &Path) -> anyhow::Result<(Option<C64>, BTreeMap<Vertex, C64>)> {
    let v = read_json(path)?;
    let modulus = v.get("modulus").map(json::parse_complex).transpose()?;
    Ok((modulus, json::coords_from_json(&v)?))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let common = cli.common.clone();
    match cli.command {
        Command::VerifyPachner {
            elliptic,
            modulus,
            coords,
            cocycle,
            batch,
        } => {
            let tol = common.tolerance.unwrap_or(Tolerances::default().end_to_end);
            let source = if let Some(p) = cocycle {
                Source::File(json::cochain_from_json(&read_json(&p)?)?)
            } else if elliptic || modulus.is_some() || coords.is_some() {
                let (file_k, c) = match coords {
                    Some(p) => {
                        let (k, c) = load_coords(&p)?;
                        (k, Some(c))
                    }
                    None => (None, None),
                };
                Source::Elliptic {
                    modulus: modulus.or(file_k),
                    coords: c,
                }
            } else {
                Source::Random
            };
            match batch {
                None => {
                    let (ok, v) = verify_one(&source, common.seed, tol)?;
                    emit(&common, &v)?;
                    if let Some(e) = v.get("error") {
                        eprintln!("error: {}", e["message"].as_str().unwrap_or_default());
                    }
                    Ok(ok)
                }
                Some(n) => {
                    let runs: Vec<(bool, Value)> = (common.seed..common.seed + n)
                        .into_par_iter()
                        .map(|s| verify_one(&source, s, tol))
                        .collect::<anyhow::Result<_>>()?;
                    let ok = runs.iter().all(|(p, _)| *p);
                    let worst = runs.iter().filter_map(|(_, v)| v["max_residual"].as_f64()).fold(0.0, f64::max);
                    let reports: Vec<Value> = runs.into_iter().map(|(_, v)| v).collect();
                    emit(&common, &json!({"runs": reports, "passed": ok, "worst_residual": json::float(worst)}))?;
                    Ok(ok)
                }
            }
        }
        Command::WeightFromCocycle { cocycle } => {
            let tol = common.tolerance.unwrap_or(1e-8);
            let omega = json::cochain_from_json(&read_json(&cocycle)?)?;
            let simplex = simplex_of_cochain(&omega)?;
            let defect = cocycle_residual(&omega, &SimplexComplex::simplex(simplex)?);
            let f = pachner_core::reconstruct_f(&omega)?;
            let back = extract_w_cocycle(&normalize_family(&f)?)?;
            let rt = back.proportionality_residual(&omega);
            let mut v = json::weight_matrix_to_json(&f);
            v["diagnostics"] = json!({
                "cocycle_residual": json::float(defect),
                "roundtrip_residual": json::float(rt),
            });
            emit(&common, &v)?;
            Ok(rt <= tol)
        }
        Command::CocycleFromWeight { input } => {
            let f = json::weight_matrix_from_json(&read_json(&input)?)?;
            let w = extract_w_cocycle(&normalize_family(&f)?)?;
            emit(&common, &json::cochain_to_json(&w))?;
            Ok(true)
        }
        Command::EdgeOperators { input } => {
            let f = match input {
                Some(p) => json::weight_matrix_from_json(&read_json(&p)?)?,
                None => random_weight_matrix(&mut ChaCha8Rng::seed_from_u64(common.seed), [1, 2, 3, 4, 5]),
            };
            let fam = normalize_family(&f)?;
            emit(&common, &json::family_to_json(&fam))?;
            Ok(fam.coboundary_residual()? <= common.tolerance.unwrap_or(1e-10))
        }
        Command::EllipticF { modulus, coords, simplex } => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let (file_k, c) = match coords {
                Some(p) => {
                    let (k, c) = load_coords(&p)?;
                    (k, Some(c))
                }
                None => (None, None),
            };
            let vertices: Vec<Vertex> = match (&simplex, &c) {
                (Some(s), _) => s.to_vec(),
                (None, Some(c)) => c.keys().copied().take(5).collect(),
                (None, None) => vec![1, 2, 3, 4, 5],
            };
            let simplex: Simplex4 = vertices.clone().try_into().map_err(|_| anyhow::anyhow!("need five coordinates"))?;
            let p = elliptic_params(&mut rng, modulus.or(file_k), c.as_ref(), &vertices)?;
            let mut v = json::weight_matrix_to_json(&elliptic_f(&p, simplex)?);
            v["params"] = json::elliptic_to_json(&p);
            emit(&common, &v)?;
            Ok(true)
        }
        Command::Selftest => {
            let cfg = AcceptanceConfig {
                seed: common.seed,
                tolerance: common.tolerance,
            };
            let results = run_all(&cfg);
            for r in &results {
                println!("{r}");
            }
            let ok = results.iter().all(|r| r.passed);
            println!("selftest seed {}: {}", common.seed, if ok { "all criteria passed" } else { "FAILED" });
            if let Some(p) = &common.out {
                let summary: Vec<Value> = results
                    .iter()
                    .map(|r| json!({"criterion": r.id, "title": r.title, "passed": r.passed, "checks": r.checks, "worst_ratio": json::float(r.worst_ratio)}))
                    .collect();
                let mut text = json::to_string(&json!({"seed": common.seed, "criteria": summary, "passed": ok}));
                text.push('\n');
                fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
