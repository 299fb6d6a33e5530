mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use toric_nl::catalog::{load_catalog, verify_catalog, CatalogEntry};
use toric_nl::cohomology::graded_cohomology;
use toric_nl::cox::{fermat_section, mult_map_surjective, random_section};
use toric_nl::fan::{singular_locus_summary, validate_fan, walls};
use toric_nl::lattice::rat_pairs;
use toric_nl::nl::{
    enumerate_lines, invariant_curve, line_classes, line_locus_codim, nl_bounds,
    syzygy_vanishing_check, HilbDim,
};
use toric_nl::regularity::{is_m_regular, oda_window_check, quick_criteria};
use toric_nl::{DivisorClass, Fan, ToricError, ToricVariety};

const THREADS_ENV: &str = "NL_TORIC_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "toric-nl",
    version,
    about = "Exact toric computations for Noether-Lefschetz bounds"
)]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct FanArg {
    /// Fan JSON file, or `catalog:<name>`.
    #[arg(long)]
    fan: String,
    /// Coordinates used for class arguments.
    #[arg(long, value_enum, default_value_t = Basis::Nef)]
    basis: Basis,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Basis {
    /// Coordinates in the designated nef basis.
    Nef,
    /// Class group coordinates (free part, then torsion).
    Class,
    /// Coefficients of the ray divisors.
    Rays,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Section {
    None,
    Fermat,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural checks of a fan.
    Validate {
        #[command(flatten)]
        fan: FanArg,
    },
    /// Class group, ray classes and the anticanonical class.
    Classgroup {
        #[command(flatten)]
        fan: FanArg,
    },
    /// Nef and Mori cones, and the positivity of a class.
    Cones {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
    },
    /// Cohomology table of a divisor class.
    Cohomology {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    /// Regularity of a class with respect to an ample class.
    Regularity {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
    },
    /// Minkowski decompositions over a window of (ample, nef) pairs.
    Oda {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Surjectivity of S_divisor x S_(k eta) -> S_(divisor + k eta).
    Multmap {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value_t = 1)]
        k: i64,
        /// Work modulo the Jacobian ideal of this section of `divisor`.
        #[arg(long, value_enum, default_value_t = Section::None)]
        section: Section,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Noether-Lefschetz codimension bounds for beta = beta_0 + n eta.
    NlBounds {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Invariant lines with respect to eta.
    Lines {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
    },
    /// Codimension of the locus of surfaces containing a given invariant curve.
    LineLocus {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Wall index; defaults to every eta-line.
        #[arg(long)]
        wall: Option<usize>,
        /// Hilbert scheme dimension, or `auto`.
        #[arg(long, default_value = "auto")]
        hilb: String,
    },
    /// Cohomology of the twisted kernel bundle M_0(k eta).
    SyzygyCheck {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Defaults to beta_0 + n eta.
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        k_min: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        k_max: i64,
    },
    /// Check every recorded catalog value.
    VerifyCatalog,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    inputs: Value,
    results: Value,
    provenance: Vec<Value>,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

enum Failure {
    Toric(ToricError),
    Usage(String),
    /// A report was produced but some check in it failed.
    Checks(Box<Report>),
}

impl From<ToricError> for Failure {
    fn from(e: ToricError) -> Self {
        Failure::Toric(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Loaded {
    variety: ToricVariety,
    entry: Option<CatalogEntry>,
    basis: Basis,
}

impl Loaded {
    fn class(&self, text: &str) -> Outcome<DivisorClass> {
        let coords = text
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| {
                Failure::Usage(format!("`{text}` is not a comma-separated integer list"))
            })?;
        let v = &self.variety;
        Ok(match self.basis {
            Basis::Rays => v.divisor(&coords)?,
            Basis::Class => v.from_class_coords(&coords)?,
            Basis::Nef => {
                if v.nef_basis().is_none() {
                    return Err(Failure::Usage(
                        "this fan has no nef basis; pass --basis class or --basis rays".into(),
                    ));
                }
                v.from_nef_coords(&coords)?
            }
        })
    }

    fn describe(&self, d: &DivisorClass) -> Value {
        let v = &self.variety;
        let mut out = json!({ "rays": d.coeffs, "class": d.class_coords });
        if let Some(c) = v.nef_coords(d) {
            out["nef"] = json!(rat_pairs(&c));
        }
        out
    }

    fn provenance(&self) -> Vec<Value> {
        match &self.entry {
            Some(e) => vec![json!({
                "entry": e.name,
                "description": e.description,
                "basis": e.basis_labels,
                "source": e.expected.source,
            })],
            None => Vec::new(),
        }
    }

    fn hilb_override(&self) -> Option<i64> {
        self.entry
            .as_ref()
            .and_then(|e| e.expected.lines.iter().find_map(|l| l.hilb_dim))
    }
}

fn read_fan(source: &str) -> Outcome<(Fan, Option<CatalogEntry>)> {
    if let Some(name) = source.strip_prefix("catalog:") {
        let e = load_catalog(name)?;
        return Ok((e.variety.fan.clone(), Some(e)));
    }
    let path = PathBuf::from(source);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok((Fan::from_json(&text)?, None))
}

fn load(arg: &FanArg) -> Outcome<Loaded> {
    let (fan, entry) = read_fan(&arg.fan)?;
    let variety = match &entry {
        Some(e) => e.variety.clone(),
        None => ToricVariety::new(fan)?,
    };
    Ok(Loaded {
        variety,
        entry,
        basis: arg.basis,
    })
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn run(command: Command) -> Outcome<Report> {
    let version = env!("CARGO_PKG_VERSION");
    let report = |command, inputs, results, provenance, seed| Report {
        command,
        inputs,
        results,
        provenance,
        version,
        seed,
    };
    Ok(match command {
        Command::Validate { fan } => {
            let (f, entry) = read_fan(&fan.fan)?;
            let validation = validate_fan(&f);
            let results = json!({
                "validation": validation,
                "singular_cones": singular_locus_summary(&f),
                "walls": if validation.valid { to_value(&walls(&f)?) } else { Value::Null },
            });
            let prov = entry
                .map(|e| vec![json!({ "entry": e.name, "description": e.description })])
                .unwrap_or_default();
            let r = report("validate", json!({ "fan": fan.fan }), results, prov, None);
            if !validation.valid {
                return Err(Failure::Checks(Box::new(r)));
            }
            r
        }
        Command::Classgroup { fan } => {
            let l = load(&fan)?;
            let v = &l.variety;
            let rays: Vec<Value> = (0..v.n_rays())
                .map(|r| l.describe(&v.ray_divisor(r)))
                .collect();
            let results = json!({
                "class_group": v.class_group,
                "picard_rank": v.picard_rank(),
                "ray_classes": rays,
                "anticanonical": l.describe(&v.anticanonical()),
                "nef_basis": v.nef_basis().map(|b| b.iter().map(|d| l.describe(d)).collect::<Vec<_>>()),
                "gorenstein": v.is_gorenstein(),
                "fano": v.is_fano(),
            });
            report(
                "classgroup",
                json!({ "fan": fan.fan }),
                results,
                l.provenance(),
                None,
            )
        }
        Command::Cones { fan, divisor } => {
            let l = load(&fan)?;
            let v = &l.variety;
            let nef: Vec<Value> = v
                .nef_cone_generators()?
                .iter()
                .map(|d| l.describe(d))
                .collect();
            let mut results = json!({
                "nef_generators": nef,
                "mori_generators": v.mori_generators()?,
            });
            if let Some(text) = &divisor {
                let d = l.class(text)?;
                let cd = v.cartier_data(&d);
                results["divisor"] = json!({
                    "class": l.describe(&d),
                    "cartier": cd.is_cartier,
                    "positivity": if cd.is_cartier { to_value(&v.positivity(&d)) } else { Value::Null },
                });
            }
            let inputs = json!({ "fan": fan.fan, "basis": fan.basis, "divisor": divisor });
            report("cones", inputs, results, l.provenance(), None)
        }
        Command::Cohomology { fan, divisor } => {
            let l = load(&fan)?;
            let d = l.class(&divisor)?;
            let t = graded_cohomology(&l.variety, &d)?;
            let results = json!({
                "divisor": l.describe(&d),
                "h": t.h,
                "euler_characteristic": t.euler_characteristic(),
                "chambers": t.chambers,
            });
            let inputs = json!({ "fan": fan.fan, "basis": fan.basis, "divisor": divisor });
            report("cohomology", inputs, results, l.provenance(), None)
        }
        Command::Regularity {
            fan,
            eta,
            divisor,
            m,
        } => {
            let l = load(&fan)?;
            let v = &l.variety;
            let e = l.class(&eta)?;
            let mut results =
                json!({ "eta": l.describe(&e), "quick_criteria": quick_criteria(v, &e)? });
            if let Some(text) = &divisor {
                let f = l.class(text)?;
                results["divisor"] = l.describe(&f);
                results["verdict"] = to_value(&is_m_regular(v, &f, &e, m)?);
            }
            let inputs = json!({ "fan": fan.fan, "basis": fan.basis, "eta": eta, "divisor": divisor, "m": m });
            report("regularity", inputs, results, l.provenance(), None)
        }
        Command::Oda { fan, bound } => {
            let l = load(&fan)?;
            let r = oda_window_check(&l.variety, bound)?;
            report(
                "oda",
                json!({ "fan": fan.fan, "bound": bound }),
                to_value(&r),
                l.provenance(),
                None,
            )
        }
        Command::Multmap {
            fan,
            divisor,
            eta,
            k,
            section,
            seed,
        } => {
            let l = load(&fan)?;
            let v = &l.variety;
            let beta = l.class(&divisor)?;
            let g = v.scale(k, &l.class(&eta)?);
            let f = match section {
                Section::None => None,
                Section::Fermat => Some(fermat_section(v, &beta)?),
                Section::Random => Some(random_section(v, &beta, seed)?),
            };
            let r = mult_map_surjective(v, f.as_ref(), &beta, &g)?;
            let mut results = to_value(&r);
            if let Some(f) = &f {
                results["section"] = f.to_json();
            }
            if section == Section::Random {
                results["note"] = json!("quasi-smoothness assumed (generic)");
            }
            let inputs = json!({
                "fan": fan.fan, "basis": fan.basis, "divisor": divisor, "eta": eta, "k": k, "section": section,
            });
            let seed = (section == Section::Random).then_some(seed);
            report("multmap", inputs, results, l.provenance(), seed)
        }
        Command::NlBounds { fan, eta, n } => {
            let l = load(&fan)?;
            let e = l.class(&eta)?;
            let r = nl_bounds(&l.variety, &e, n)?;
            let inputs = json!({ "fan": fan.fan, "basis": fan.basis, "eta": eta, "n": n });
            report("nl-bounds", inputs, to_value(&r), l.provenance(), None)
        }
        Command::Lines { fan, eta } => {
            let l = load(&fan)?;
            let e = l.class(&eta)?;
            let lines = enumerate_lines(&l.variety, &e)?;
            let classes: Vec<Value> = line_classes(&lines)
                .into_iter()
                .map(|(p, walls)| json!({ "pairing": rat_pairs(&p), "walls": walls }))
                .collect();
            let inputs = json!({ "fan": fan.fan, "basis": fan.basis, "eta": eta });
            report(
                "lines",
                inputs,
                json!({ "lines": lines, "classes": classes }),
                l.provenance(),
                None,
            )
        }
        Command::LineLocus {
            fan,
            eta,
            n,
            wall,
            hilb,
        } => {
            let l = load(&fan)?;
            let v = &l.variety;
            let e = l.class(&eta)?;
            let given = match hilb.as_str() {
                "auto" => None,
                t => Some(t.parse::<i64>().map_err(|_| {
                    Failure::Usage(format!("--hilb takes `auto` or an integer, got `{t}`"))
                })?),
            };
            let targets: Vec<usize> = match wall {
                Some(w) if w < v.walls.len() => vec![w],
                Some(w) => return Err(Failure::Usage(format!("no wall {w}"))),
                None => enumerate_lines(v, &e)?
                    .into_iter()
                    .map(|c| c.wall)
                    .collect(),
            };
            let mut rows = Vec::new();
            for w in targets {
                let curve = invariant_curve(v, &e, w);
                let h = match (given, curve.in_smooth_locus, l.hilb_override()) {
                    (Some(d), _, _) => HilbDim::Given(d),
                    (None, false, Some(d)) => HilbDim::Given(d),
                    _ => HilbDim::Auto,
                };
                let locus = line_locus_codim(v, &e, n, w, h)?;
                rows.push(json!({ "curve": curve, "locus": locus }));
            }
            let inputs = json!({ "fan": fan.fan, "basis": fan.basis, "eta": eta, "n": n, "wall": wall, "hilb": hilb });
            report(
                "line-locus",
                inputs,
                json!({ "loci": rows }),
                l.provenance(),
                None,
            )
        }
        Command::SyzygyCheck {
            fan,
            eta,
            divisor,
            n,
            k_min,
            k_max,
        } => {
            let l = load(&fan)?;
            let v = &l.variety;
            let e = l.class(&eta)?;
            let beta = match &divisor {
                Some(t) => l.class(t)?,
                None => v.combine(&[(1, &v.anticanonical()), (n, &e)]),
            };
            let ks: Vec<i64> = (k_min..=k_max).collect();
            let qs: Vec<usize> = (1..=v.dim()).collect();
            let r = syzygy_vanishing_check(v, &beta, &e, &ks, &qs)?;
            let mut results = to_value(&r);
            results["beta"] = l.describe(&beta);
            let inputs = json!({
                "fan": fan.fan, "basis": fan.basis, "eta": eta, "divisor": divisor, "n": n,
                "k_min": k_min, "k_max": k_max,
            });
            report("syzygy-check", inputs, results, l.provenance(), None)
        }
        Command::VerifyCatalog => {
            let checks = verify_catalog()?;
            let failed: Vec<_> = checks.iter().filter(|c| !c.pass).cloned().collect();
            let results = json!({
                "checks": checks.len(),
                "failed": failed.len(),
                "failures": failed,
                "all": checks,
            });
            let r = report("verify-catalog", json!({}), results, Vec::new(), None);
            if !failed.is_empty() {
                return Err(Failure::Checks(Box::new(r)));
            }
            r
        }
    })
}

fn emit(report: &Report, pretty: bool) {
    let value = to_value(report);
    if pretty {
        print!("{}", render::text(&value));
    } else {
        println!("{}", serde_json::to_string(&value).expect("json"));
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(report) => {
            emit(&report, cli.pretty);
            ExitCode::SUCCESS
        }
        Err(Failure::Checks(report)) => {
            emit(&report, cli.pretty);
            eprintln!("error: {} reported failures", report.command);
            ExitCode::from(1)
        }
        Err(Failure::Toric(ToricError::Hypothesis(msg))) => {
            eprintln!("hypothesis not satisfied: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Toric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
