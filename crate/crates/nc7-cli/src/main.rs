//! Command-line front end: group inspection, exact hauptmodul tables and
//! certificates, Eisenstein numerics, and reproducible run manifests.

use clap::{Args, Parser, Subcommand};
use nc7::eisenstein::{
    self, d_partial, eisenstein_coefficient, g2_exact, g4_fit_and_predict, stats_scan,
};
use nc7::hauptmodul::{self, ResidueChoice};
use nc7::permgroup::{descriptor, outer_automorphism_image, GroupId};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "nc7", version, about = "index-7 noncongruence modular data")]
struct Cli {
    /// Worker threads for numeric commands (default: available parallelism).
    /// Results are independent of this setting.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Manifest output path (default: <out>.manifest.json, or manifest.json).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group-level queries (permutation data, generators, outer automorphism)
    #[command(subcommand)]
    Group(GroupCmd),
    /// Exact hauptmodul expansions and mod-7 certificates
    #[command(subcommand)]
    Hauptmodul(HauptCmd),
    /// Eisenstein-series numerics and exact low-weight series
    #[command(subcommand)]
    Eis(EisCmd),
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Print the permutation images, widths, and generator matrices
    Dump(GroupArgs),
    /// Print the image of the group under the outer automorphism
    Outer(GroupArgs),
}

#[derive(Args)]
struct GroupArgs {
    /// Group id: G1..G7, H1..H7, U1..U7, V1..V7
    #[arg(long)]
    group: String,
}

#[derive(Subcommand)]
enum HauptCmd {
    /// Solve the normalized hauptmodul expansion and print the table
    Solve(SolveArgs),
    /// Compute the unbounded-denominator certificate mod a prime over 7
    CertifyUbd(CertifyArgs),
    /// Write the expansion to a JSON file
    Export(ExportArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    group: String,
    /// highest coefficient index
    #[arg(long, default_value_t = 500)]
    order: i64,
    /// optional JSON output path (prints a table otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 500)]
    order: i64,
    /// residue selecting the prime over 7 in Q(zeta3): auto, 2, or 4
    #[arg(long, default_value = "auto")]
    residue: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 500)]
    order: i64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum EisCmd {
    /// Partial Dirichlet sum D(n,k) and the resulting Fourier coefficient
    Sum(SumArgs),
    /// Exact normalized weight-2 series coefficients
    G2(G2Args),
    /// Fit the weight-4 ansatz constant and predict higher coefficients
    G4fit(G4Args),
    /// Scan X(1,c) and write per-c statistics as CSV
    Stats(StatsArgs),
}

#[derive(Args)]
struct SumArgs {
    /// numeric paths are implemented for G1
    #[arg(long, default_value = "G1")]
    group: String,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// summation cutoff in c
    #[arg(long = "N")]
    cutoff: u32,
    /// working precision in decimal digits (15..=31)
    #[arg(long, default_value_t = 30)]
    precision: u32,
    /// chunk size of the deterministic ascending-c accumulation
    #[arg(long, default_value_t = 4096)]
    chunk: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct G2Args {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 10)]
    order: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct G4Args {
    /// cutoff for the numeric a1 input of the fit
    #[arg(long = "N", default_value_t = 100_000)]
    cutoff: u32,
    #[arg(long, default_value_t = 30)]
    precision: u32,
    /// highest predicted index
    #[arg(long, default_value_t = 10)]
    order: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// only n = 1 is implemented for the scan
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long)]
    cmax: u32,
    /// CSV output path
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Manifest {
    artifact: &'static str,
    version: &'static str,
    command: Vec<String>,
    wall_seconds: f64,
    outputs: Vec<ManifestOutput>,
}

#[derive(Serialize)]
struct ManifestOutput {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct ErrorObject {
    error: String,
}

fn sha256_hex(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    let digest = h.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

fn parse_group(s: &str) -> Result<GroupId, String> {
    s.parse::<GroupId>().map_err(|e| format!("bad group id {s:?}: {e}"))
}

/// One produced artifact: either a file or a stdout block; both are digested.
struct Produced {
    path: String,
    data: Vec<u8>,
    to_stdout: bool,
}

fn run(cli: &Cli) -> Result<Vec<Produced>, String> {
    match &cli.command {
        Command::Group(GroupCmd::Dump(a)) => {
            let id = parse_group(&a.group)?;
            let g = descriptor(id);
            let mut out = String::new();
            let _ = writeln!(out, "group {}", g.id);
            let _ = writeln!(out, "width {}", g.width);
            let _ = writeln!(out, "basepoint {}", g.basepoint);
            let _ = writeln!(out, "phi(S) = {}", g.phi_s);
            let _ = writeln!(out, "phi(R) = {}", g.phi_r);
            let _ = writeln!(out, "phi(T) = {}", g.phi_t);
            for (i, m) in g.generators.iter().enumerate() {
                let _ = writeln!(out, "generator {} = {}", i + 1, m);
            }
            Ok(vec![Produced {
                path: "<stdout>".into(),
                data: out.into_bytes(),
                to_stdout: true,
            }])
        }
        Command::Group(GroupCmd::Outer(a)) => {
            let id = parse_group(&a.group)?;
            let img = outer_automorphism_image(descriptor(id));
            Ok(vec![Produced {
                path: "<stdout>".into(),
                data: format!("{img}\n").into_bytes(),
                to_stdout: true,
            }])
        }
        Command::Hauptmodul(HauptCmd::Solve(a)) => {
            let id = parse_group(&a.group)?;
            let rows = hauptmodul::export_normalized_table(id, a.order)
                .map_err(|e| e.to_string())?;
            if let Some(path) = &a.out {
                let doc = serde_json::json!({
                    "schema": "nc7.series.v1",
                    "group": id.to_string(),
                    "order": a.order,
                    "coefficients": rows.iter().map(|(n, v)| {
                        serde_json::json!({"n": n, "value": v})
                    }).collect::<Vec<_>>(),
                });
                Ok(vec![Produced {
                    path: path.display().to_string(),
                    data: serde_json::to_vec_pretty(&doc).unwrap(),
                    to_stdout: false,
                }])
            } else {
                let mut out = String::new();
                for (n, v) in rows {
                    let _ = writeln!(out, "{n}\t{v}");
                }
                Ok(vec![Produced {
                    path: "<stdout>".into(),
                    data: out.into_bytes(),
                    to_stdout: true,
                }])
            }
        }
        Command::Hauptmodul(HauptCmd::CertifyUbd(a)) => {
            let id = parse_group(&a.group)?;
            let choice = match a.residue.as_str() {
                "auto" => ResidueChoice::Auto,
                "2" => ResidueChoice::Fixed(2),
                "4" => ResidueChoice::Fixed(4),
                other => return Err(format!("bad residue {other:?} (auto, 2, or 4)")),
            };
            let cert = hauptmodul::ubd_certificate(id, a.order, choice)
                .map_err(|e| e.to_string())?;
            let doc = serde_json::json!({
                "schema": "nc7.ubd.v1",
                "group": cert.group.to_string(),
                "order": cert.order,
                "residue": cert.residue,
                "other_residue_failed": cert.other_residue_failed,
                "integral": cert.integral,
                "reduced_equation_ok": cert.reduced_equation_ok,
                "jhat_collapsed": cert.jhat_collapsed,
                "shape": {
                    "exponent_e": cert.shape.exponent_e,
                    "alpha": cert.shape.alpha,
                    "beta": cert.shape.beta,
                    "collapsed": cert.shape.collapsed,
                },
                "matches_displayed_g1": cert.matches_displayed_g1,
                "nonzero_count": cert.nonzero_indices.len(),
                "last_nonzero": cert.nonzero_indices.last(),
                "tail_nonzero": cert.tail_nonzero,
                "valid": cert.valid(),
            });
            let data = serde_json::to_vec_pretty(&doc).unwrap();
            match &a.out {
                Some(path) => Ok(vec![Produced {
                    path: path.display().to_string(),
                    data,
                    to_stdout: false,
                }]),
                None => Ok(vec![Produced {
                    path: "<stdout>".into(),
                    data,
                    to_stdout: true,
                }]),
            }
        }
        Command::Hauptmodul(HauptCmd::Export(a)) => {
            let id = parse_group(&a.group)?;
            let rows = hauptmodul::export_normalized_table(id, a.order)
                .map_err(|e| e.to_string())?;
            let doc = serde_json::json!({
                "schema": "nc7.series.v1",
                "group": id.to_string(),
                "order": a.order,
                "coefficients": rows.iter().map(|(n, v)| {
                    serde_json::json!({"n": n, "value": v})
                }).collect::<Vec<_>>(),
            });
            Ok(vec![Produced {
                path: a.out.display().to_string(),
                data: serde_json::to_vec_pretty(&doc).unwrap(),
                to_stdout: false,
            }])
        }
        Command::Eis(EisCmd::Sum(a)) => {
            let id = parse_group(&a.group)?;
            if id.to_string() != "G1" {
                return Err("the numeric Dirichlet path is implemented for G1".into());
            }
            let p = a.precision as usize;
            let partial = d_partial(a.n, a.k, a.cutoff, a.chunk, a.precision)
                .map_err(|e| e.to_string())?;
            let mut doc = serde_json::json!({
                "schema": "nc7.sum.v1",
                "group": "G1",
                "n": a.n,
                "k": a.k,
                "N": a.cutoff,
                "chunk": a.chunk,
                "precision": a.precision,
                "D": {
                    "re": partial.value.re.to_decimal(p),
                    "im": partial.value.im.to_decimal(p),
                },
                "error_bound": partial.error_bound,
                "bound_kind": partial.bound_kind,
            });
            if a.k >= 4 && a.k % 2 == 0 {
                let coeff = eisenstein_coefficient(a.n, a.k, a.cutoff, a.precision, a.chunk)
                    .map_err(|e| e.to_string())?;
                let norm = eisenstein::normalize_g1_coefficient(a.n, coeff.value);
                doc["a_n"] = serde_json::json!({
                    "re": coeff.value.re.to_decimal(p),
                    "im": coeff.value.im.to_decimal(p),
                    "error_bound": coeff.error_bound,
                });
                doc["a_n_normalized"] = serde_json::json!({
                    "re": norm.re.to_decimal(p),
                    "im": norm.im.to_decimal(p),
                });
            }
            let data = serde_json::to_vec_pretty(&doc).unwrap();
            match &a.out {
                Some(path) => Ok(vec![Produced {
                    path: path.display().to_string(),
                    data,
                    to_stdout: false,
                }]),
                None => Ok(vec![Produced {
                    path: "<stdout>".into(),
                    data,
                    to_stdout: true,
                }]),
            }
        }
        Command::Eis(EisCmd::G2(a)) => {
            let id = parse_group(&a.group)?;
            let series = g2_exact(id, a.order).map_err(|e| e.to_string())?;
            let doc = serde_json::json!({
                "schema": "nc7.g2.v1",
                "group": id.to_string(),
                "order": a.order,
                "normalized_coefficients": (0..=a.order).map(|n| {
                    serde_json::json!({"n": n, "value": series.coeff(n).to_string()})
                }).collect::<Vec<_>>(),
            });
            let data = serde_json::to_vec_pretty(&doc).unwrap();
            match &a.out {
                Some(path) => Ok(vec![Produced {
                    path: path.display().to_string(),
                    data,
                    to_stdout: false,
                }]),
                None => Ok(vec![Produced {
                    path: "<stdout>".into(),
                    data,
                    to_stdout: true,
                }]),
            }
        }
        Command::Eis(EisCmd::G4fit(a)) => {
            let p = a.precision as usize;
            let fit = g4_fit_and_predict(a.cutoff, a.precision, a.order)
                .map_err(|e| e.to_string())?;
            let doc = serde_json::json!({
                "schema": "nc7.g4fit.v1",
                "N": fit.cutoff,
                "precision": fit.precision,
                "a1_numeric": fit.a1_numeric.to_decimal(p),
                "a1_error_bound": fit.a1_error_bound,
                "C": fit.c_fit.to_decimal(p),
                "C_error_bound": fit.c_error_bound,
                "condition": fit.condition,
                "predicted": fit.predicted.iter().zip(&fit.predicted_bounds).enumerate().map(
                    |(n, (v, b))| serde_json::json!({
                        "n": n,
                        "value": v.to_decimal(p),
                        "bound": b,
                    })).collect::<Vec<_>>(),
            });
            let data = serde_json::to_vec_pretty(&doc).unwrap();
            match &a.out {
                Some(path) => Ok(vec![Produced {
                    path: path.display().to_string(),
                    data,
                    to_stdout: false,
                }]),
                None => Ok(vec![Produced {
                    path: "<stdout>".into(),
                    data,
                    to_stdout: true,
                }]),
            }
        }
        Command::Eis(EisCmd::Stats(a)) => {
            if a.n != 1 {
                return Err("the statistics scan is implemented for n = 1".into());
            }
            let mut csv = String::from("c,c_mod_12,re,im,abs,norm27,norm12,is_exception\n");
            let summary = stats_scan(a.cmax, |r| {
                let _ = writeln!(
                    csv,
                    "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                    r.c,
                    r.c % 12,
                    r.re,
                    r.im,
                    r.abs,
                    r.norm27,
                    r.norm12,
                    u8::from(r.is_exception)
                );
            });
            let report = serde_json::json!({
                "schema": "nc7.scan.v1",
                "cmax": summary.cmax,
                "rows": summary.rows,
                "exception_count": summary.exceptions.len(),
                "exceptions": summary.exceptions,
                "max_exception_c": summary.exceptions.iter().max(),
            });
            let mut produced = vec![Produced {
                path: a.csv.display().to_string(),
                data: csv.into_bytes(),
                to_stdout: false,
            }];
            let data = serde_json::to_vec_pretty(&report).unwrap();
            match &a.out {
                Some(path) => produced.push(Produced {
                    path: path.display().to_string(),
                    data,
                    to_stdout: false,
                }),
                None => produced.push(Produced {
                    path: "<stdout>".into(),
                    data,
                    to_stdout: true,
                }),
            }
            Ok(produced)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!(
                "{}",
                serde_json::to_string(&ErrorObject {
                    error: format!("worker pool: {e}")
                })
                .unwrap()
            );
            std::process::exit(1);
        }
    }
    let started = Instant::now();
    match run(&cli) {
        Ok(produced) => {
            let mut outputs = Vec::new();
            for p in &produced {
                if p.to_stdout {
                    use std::io::Write;
                    let mut out = std::io::stdout();
                    out.write_all(&p.data).unwrap();
                    if p.data.last() != Some(&b'\n') {
                        out.write_all(b"\n").unwrap();
                    }
                } else if let Err(e) = std::fs::write(&p.path, &p.data) {
                    eprintln!(
                        "{}",
                        serde_json::to_string(&ErrorObject {
                            error: format!("writing {}: {e}", p.path)
                        })
                        .unwrap()
                    );
                    std::process::exit(1);
                }
                outputs.push(ManifestOutput {
                    path: p.path.clone(),
                    sha256: sha256_hex(&p.data),
                    bytes: p.data.len(),
                });
            }
            let manifest = Manifest {
                artifact: "nc7",
                version: env!("CARGO_PKG_VERSION"),
                command: std::env::args().collect(),
                wall_seconds: started.elapsed().as_secs_f64(),
                outputs,
            };
            let manifest_path = cli.manifest.clone().unwrap_or_else(|| {
                match produced.iter().find(|p| !p.to_stdout) {
                    Some(p) => PathBuf::from(format!("{}.manifest.json", p.path)),
                    None => PathBuf::from("manifest.json"),
                }
            });
            if let Err(e) = std::fs::write(
                &manifest_path,
                serde_json::to_vec_pretty(&manifest).unwrap(),
            ) {
                eprintln!(
                    "{}",
                    serde_json::to_string(&ErrorObject {
                        error: format!("writing manifest: {e}")
                    })
                    .unwrap()
                );
                std::process::exit(1);
            }
        }
        Err(msg) => {
            eprintln!(
                "{}",
                serde_json::to_string(&ErrorObject { error: msg }).unwrap()
            );
            std::process::exit(1);
        }
    }
}
