//! Command-line front end. Every command prints one JSON document on standard output.

use std::io::Write;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::Field;
use crate::bundle::{presentation_to_json, Bundle};
use crate::error::{Error, Result};
use crate::logic::{galois_to_fo, witness_extension, Oracle};
use crate::points::{enumerate_realisations, render_points, DiffField, DEFAULT_BUDGET};
use crate::qe::{
    direct_image, frobenius_scan, frobenius_scan_pair, quantifier_eliminate, Case, DirectImageTask,
};
use crate::strat::Stratification;

#[derive(Parser, Debug)]
#[command(name = "diffqe", version, about = "Galois stratifications and quantifier elimination for difference fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct FieldArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Enumeration budget in evaluations.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Also write the result to this file.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseArg {
    FiniteEtale,
    Fibration,
    Composite,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a bundle and validate every object in it.
    Validate {
        bundle: String,
        #[command(flatten)]
        common: Common,
    },
    /// Split a presentation into H-direct components.
    Decompose {
        bundle: String,
        presentation: String,
        #[command(flatten)]
        common: Common,
    },
    /// Realisations of a presentation over F_{q^m}.
    Points {
        bundle: String,
        presentation: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Frobenius thresholds of a presentation, or of a formula against its elimination.
    Frobscan {
        bundle: String,
        object: String,
        /// Range of q as `qmin:qmax`; prime powers in it are tested.
        #[arg(long, default_value = "2:13")]
        grid: String,
        #[arg(long = "m-max", default_value_t = 3)]
        m_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a stratification over F_{q^m}.
    EvalGalois {
        bundle: String,
        stratification: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a formula over F_{q^m} by brute force.
    EvalFormula {
        bundle: String,
        formula: String,
        #[command(flatten)]
        field: FieldArgs,
        /// Quantify over F_{q^{m k}} instead.
        #[arg(long, default_value_t = 1)]
        extension: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Translate a stratification into a formula.
    Gal2fo {
        bundle: String,
        stratification: String,
        #[command(flatten)]
        common: Common,
    },
    /// Direct image of a stratification along a morphism.
    Image {
        bundle: String,
        morphism: String,
        stratification: String,
        #[arg(long, value_enum, default_value = "composite")]
        case: CaseArg,
        #[command(flatten)]
        common: Common,
    },
    /// Eliminate the quantifiers of a formula.
    Qe {
        bundle: String,
        formula: String,
        /// Also evaluate the result over F_{q^m}.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[command(flatten)]
        common: Common,
    },
}

fn prime_powers(grid: &str) -> Result<Vec<u64>> {
    let bad = || Error::schema("--grid", format!("expected `qmin:qmax`, got `{grid}`"));
    let (a, b) = grid.split_once(':').ok_or_else(bad)?;
    let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    Ok((a.max(2)..=b).filter(|&q| crate::algebra::field::prime_power(q).is_some()).collect())
}

fn points_json(k: &DiffField, pts: &[Vec<u32>]) -> Result<Value> {
    Ok(json!({ "q": k.q() as u64, "m": k.m, "points": render_points(k, pts)? }))
}

fn output_bundle(name: &str, s: Stratification) -> Bundle {
    let mut b = Bundle::new();
    b.presentations.insert("ambient".into(), s.ambient.clone());
    b.stratifications.insert(name.into(), s);
    b
}

fn run(cmd: Command) -> Result<(Value, Option<std::path::PathBuf>)> {
    match cmd {
        Command::Validate { bundle, common } => {
            let b = Bundle::load(&bundle)?;
            let v = json!({
                "valid": true,
                "presentations": b.presentations.len(),
                "morphisms": b.morphisms.len(),
                "covers": b.covers.len(),
                "stratifications": b.stratifications.len(),
                "formulas": b.formulas.len(),
            });
            Ok((v, common.out))
        }
        Command::Decompose { bundle, presentation, common } => {
            let b = Bundle::load(&bundle)?;
            let comps = b.presentation(&presentation)?.direct_decompose()?;
            let v = json!({ "components": comps.iter().map(presentation_to_json).collect::<Vec<_>>() });
            Ok((v, common.out))
        }
        Command::Points { bundle, presentation, field, common } => {
            let b = Bundle::load(&bundle)?;
            let k = DiffField::from_q(field.q, field.m)?;
            let pts = enumerate_realisations(b.presentation(&presentation)?, &k, common.budget)?;
            Ok((points_json(&k, &pts)?, common.out))
        }
        Command::Frobscan { bundle, object, grid, m_max, common } => {
            let b = Bundle::load(&bundle)?;
            let qs = prime_powers(&grid)?;
            let report = if let Some(p) = b.presentations.get(&object) {
                frobenius_scan(&object, p, &qs, m_max, common.budget)?
            } else {
                let f = b.formula(&object)?;
                let r = quantifier_eliminate(f, &Field::Rationals, None)?;
                let ext = witness_extension(&r.stratification);
                let ms: Vec<u32> = (1..=m_max).collect();
                frobenius_scan_pair(&object, &qs, &ms, |k| {
                    let got = r.realisations(k, common.budget)?;
                    let want = Oracle::with_extension(k, ext, common.budget)?.realisations(f, &r.vars)?;
                    Ok((got, want))
                })?
            };
            Ok((serde_json::to_value(report).expect("report"), common.out))
        }
        Command::EvalGalois { bundle, stratification, field, common } => {
            let b = Bundle::load(&bundle)?;
            let k = DiffField::from_q(field.q, field.m)?;
            let e = b.stratification(&stratification)?.evaluate(&k, common.budget)?;
            Ok((points_json(&k, &e.points)?, common.out))
        }
        Command::EvalFormula { bundle, formula, field, extension, common } => {
            let b = Bundle::load(&bundle)?;
            let f = b.formula(&formula)?;
            let k = DiffField::from_q(field.q, field.m)?;
            let vars = f.free_vars();
            let pts = Oracle::with_extension(&k, extension, common.budget)?.realisations(f, &vars)?;
            let mut v = points_json(&k, &pts)?;
            v["vars"] = json!(vars);
            Ok((v, common.out))
        }
        Command::Gal2fo { bundle, stratification, common } => {
            let b = Bundle::load(&bundle)?;
            let a = b.stratification(&stratification)?;
            let f = galois_to_fo(a)?;
            let v = json!({ "formula": f.to_string(), "extension": witness_extension(a) });
            Ok((v, common.out))
        }
        Command::Image { bundle, morphism, stratification, case, common } => {
            let b = Bundle::load(&bundle)?;
            let case = match case {
                CaseArg::FiniteEtale => Case::FiniteEtale,
                CaseArg::Fibration => Case::Fibration,
                CaseArg::Composite => Case::Composite,
            };
            let task = DirectImageTask {
                morphism: b.morphism(&morphism)?.clone(),
                input: b.stratification(&stratification)?.clone(),
                case,
            };
            let r = direct_image(&task)?;
            let mut out = output_bundle("image", r.output);
            out.presentations.insert("ambient".into(), Arc::clone(&task.morphism.target));
            let v = json!({
                "case": case,
                "max_depth": r.max_depth,
                "depth_bound": r.depth_bound,
                "bundle": out.to_json(),
            });
            Ok((v, common.out))
        }
        Command::Qe { bundle, formula, q, m, common } => {
            let b = Bundle::load(&bundle)?;
            let f = b.formula(&formula)?;
            let r = quantifier_eliminate(f, &Field::Rationals, None)?;
            let mut v = json!({
                "vars": r.vars,
                "depth": r.depth,
                "max_devissage": r.max_devissage,
                "extension": witness_extension(&r.stratification),
            });
            if let Some(q) = q {
                let k = DiffField::from_q(q, m)?;
                let pts = r.realisations(&k, common.budget)?;
                v["points"] = points_json(&k, &pts)?["points"].clone();
            }
            v["bundle"] = output_bundle("qe", r.stratification).to_json();
            Ok((v, common.out))
        }
    }
}

/// Run the CLI on `args` (including the program name), writing to `out`; returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    let (text, code, path) = match run(cli.command) {
        Ok((v, path)) => (serde_json::to_string(&v).expect("json"), 0, path),
        Err(e) => {
            let v = json!({ "error": { "stage": e.stage(), "detail": e.to_string() } });
            (serde_json::to_string(&v).expect("json"), 1, None)
        }
    };
    let _ = writeln!(out, "{text}");
    if let Some(p) = path {
        if let Err(e) = std::fs::write(&p, format!("{text}\n")) {
            let v = json!({ "error": { "stage": "io", "detail": e.to_string() } });
            let _ = writeln!(out, "{v}");
            return 1;
        }
    }
    code
}
