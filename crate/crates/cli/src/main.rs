use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bogomolov::catalog::{parse_catalog, parse_inline, Catalog};
use bogomolov::cayley_bacharach::{
    cb_failures, cb_for_direct_sum, parse_cycle, serre_degree, vanishing_dim, CbQuery, ZeroCycle,
};
use bogomolov::exact::{parse_rational, RatDisplay};
use bogomolov::existence_bounds::{dry_defect, li_qin_alpha, ChernShape};
use bogomolov::large_families::{
    make_schedule, verify_order, FamilyParams, DEFAULT_M_RANGE, DEFAULT_TOL_RATIO, DEFAULT_TOL_SLOPE,
    DEFAULT_TWIST,
};
use bogomolov::sbi_falsifier::{
    audit_certificate, choose_exponents, exponents_with, falsify_with, parse_certificate, SbiQuery,
};
use bogomolov::surface_lattice::{validate, SurfaceInvariants};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

const REJECT: u8 = 1;
const ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "bogomolov", version, about = "Large families of stable bundles and SBI certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct SurfaceSource {
    /// Catalog surface name.
    #[arg(long)]
    surface: Option<String>,
    /// Inline invariants, e.g. "e=1,k=-3,chi=1,pg=0,q=0,ksq=9,euler_c2=3".
    #[arg(long)]
    inline: Option<String>,
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    #[command(flatten)]
    source: SurfaceSource,
    /// Catalog file replacing the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RangeArgs {
    #[arg(long, default_value_t = DEFAULT_M_RANGE.0)]
    m_min: u64,
    #[arg(long, default_value_t = DEFAULT_M_RANGE.1)]
    m_max: u64,
    /// Fixed value of r*a - b.
    #[arg(long, default_value_t = DEFAULT_TWIST)]
    c: i64,
}

#[derive(Subcommand)]
enum Command {
    /// List the surfaces of the catalog.
    Catalog {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Check the invariants of a surface.
    Validate(SurfaceArgs),
    /// Existence bound for rank r, L = a L0, c1 = b L0.
    #[command(allow_negative_numbers = true)]
    Alpha {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: i64,
    },
    /// Schedule of a large family of order (s, t) with order verdicts.
    #[command(allow_negative_numbers = true)]
    Schedule {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_parser = rational)]
        s: BigRational,
        #[arg(long, value_parser = rational)]
        t: BigRational,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, default_value_t = DEFAULT_TOL_SLOPE)]
        tol_slope: f64,
        #[arg(long, default_value_t = DEFAULT_TOL_RATIO)]
        tol_ratio: f64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificate that SBI_l fails on the surface.
    #[command(allow_negative_numbers = true)]
    Sbi {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Exponent l > 4 of the inequality Delta >= sigma r^l.
        #[arg(long, value_parser = rational)]
        l: BigRational,
        /// Threshold to undercut; repeatable.
        #[arg(long = "sigma", value_parser = rational, default_value = "1")]
        sigmas: Vec<BigRational>,
        #[command(flatten)]
        range: RangeArgs,
        /// Rank exponent override (requires --x).
        #[arg(long, value_parser = rational, requires = "x")]
        s: Option<BigRational>,
        /// Discriminant excess override, t = 4s + x (requires --s).
        #[arg(long, value_parser = rational, requires = "s")]
        x: Option<BigRational>,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Omit the generated_at field.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Re-verify a certificate file.
    SbiCheck {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Cayley-Bacharach property of a cycle for |O(d)| on the plane.
    #[command(allow_negative_numbers = true)]
    Cb {
        #[arg(long)]
        cycle_file: PathBuf,
        #[arg(long)]
        d: i64,
    },
    /// Local freeness criterion for extensions of a direct sum on the plane.
    #[command(allow_negative_numbers = true)]
    CbSum {
        #[arg(long = "cycles", required = true)]
        cycles: Vec<PathBuf>,
        #[arg(long = "degrees", required = true)]
        degrees: Vec<i64>,
        #[arg(long)]
        lprime: i64,
    },
    /// Douglas-Reinbacher-Yau defect 2rc2 - (r-1)c1^2 - r^2 c2(S)/12.
    #[command(allow_negative_numbers = true)]
    Dry {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        c1sq: BigInt,
        #[arg(long)]
        c2: BigInt,
    },
}

fn rational(text: &str) -> Result<BigRational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

type Outcome = Result<bool, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(REJECT),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog, String> {
    match path {
        None => Ok(Catalog::builtin()),
        Some(p) => {
            let text = read(p)?;
            parse_catalog(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl SurfaceArgs {
    fn resolve(&self) -> Result<SurfaceInvariants, String> {
        match (&self.source.surface, &self.source.inline) {
            (Some(name), _) => {
                let catalog = load_catalog(self.catalog.as_deref())?;
                catalog.get(name).cloned().map_err(|e| e.to_string())
            }
            (None, Some(text)) => parse_inline(text).map_err(|e| e.to_string()),
            (None, None) => Err("one of --surface or --inline is required".into()),
        }
    }

    fn resolve_valid(&self) -> Result<SurfaceInvariants, String> {
        let inv = self.resolve()?;
        inv.ensure_valid().map_err(|e| format!("{}: {e}", inv.label()))?;
        Ok(inv)
    }
}

fn load_cycle(path: &Path) -> Result<ZeroCycle, String> {
    parse_cycle(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn unix_time() -> String {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default()
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Catalog { catalog } => {
            let catalog = load_catalog(catalog.as_deref())?;
            for s in &catalog.surfaces {
                let status = if validate(s).is_empty() { "valid" } else { "INVALID" };
                println!(
                    "{}\te={} k={} chi={} pg={} q={}\t{status}",
                    s.label(),
                    s.e,
                    s.k,
                    s.chi,
                    s.pg,
                    s.q
                );
            }
            Ok(true)
        }
        Command::Validate(surface) => {
            let inv = surface.resolve()?;
            let violations = validate(&inv);
            if violations.is_empty() {
                println!("{}: valid", inv.label());
            } else {
                println!("{}: {} violation(s)", inv.label(), violations.len());
                for v in &violations {
                    println!("  - {v}");
                }
            }
            Ok(violations.is_empty())
        }
        Command::Alpha { surface, r, a, b } => {
            let inv = surface.resolve_valid()?;
            let shape = ChernShape::new(r, a, b).map_err(|e| e.to_string())?;
            let rep = li_qin_alpha(&inv, &shape).map_err(|e| e.to_string())?;
            println!("surface = {}", inv.label());
            println!("r = {r}, a = {a}, b = {b}, c = {}", shape.twist());
            println!("max_term = {}", rep.max_term);
            println!("alpha = {}", RatDisplay(&rep.alpha));
            println!("min_c2 = {}", rep.alpha_ceiling);
            if rep.precondition_ok {
                println!("precondition = ok (r L^2 > K.L)");
            } else {
                println!("precondition = FAILED: r L^2 > K.L does not hold; rescale a");
            }
            Ok(true)
        }
        Command::Schedule {
            surface,
            s,
            t,
            range,
            tol_slope,
            tol_ratio,
            out,
        } => {
            let inv = surface.resolve_valid()?;
            let params = FamilyParams::new(s.clone(), t.clone(), range.c, range.m_min, range.m_max)
                .map_err(|e| e.to_string())?;
            let schedule = make_schedule(&inv, &params).map_err(|e| e.to_string())?;
            write_or_print(out.as_deref(), &schedule.to_table())?;

            let s_f = to_f64(&s);
            let t_f = to_f64(&t);
            let mut lines = Vec::new();
            let mut accepted = true;
            for (label, seq, exp) in [("rank", schedule.ranks(), s_f), ("discriminant", schedule.discriminants(), t_f)] {
                match verify_order(&seq, exp, tol_slope, tol_ratio) {
                    Ok(v) => {
                        accepted &= v.accepted;
                        lines.push(format!(
                            "{label} order {exp}: {} (slope {:.6}, ratio spread {:.6})",
                            if v.accepted { "accept" } else { "reject" },
                            v.slope,
                            v.spread
                        ));
                    }
                    Err(e) => {
                        accepted = false;
                        lines.push(format!("{label} order {exp}: not verifiable: {e}"));
                    }
                }
            }
            for line in lines {
                if out.is_some() {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
            Ok(accepted)
        }
        Command::Sbi {
            surface,
            l,
            sigmas,
            range,
            s,
            x,
            out,
            no_timestamp,
        } => {
            let inv = surface.resolve_valid()?;
            let exponents = match (s, x) {
                (Some(s), Some(x)) => exponents_with(&l, s, x),
                _ => choose_exponents(&l),
            }
            .map_err(|e| e.to_string())?;
            let query = SbiQuery {
                l,
                sigmas,
                surface: inv,
            };
            let mut cert = falsify_with(&query, exponents, range.m_min, range.m_max, range.c)
                .map_err(|e| e.to_string())?;
            if !no_timestamp {
                cert.generated_at = Some(unix_time());
            }
            write_or_print(out.as_deref(), &cert.to_toml())?;
            eprintln!("decay slope {} (t - l s = {})", cert.decay_slope, {
                let e = &cert.exponents;
                RatDisplay(&(&e.t - &query.l * &e.s)).to_string()
            });
            for th in &cert.thresholds {
                match (th.n, &th.extrapolated_n) {
                    (Some(n), _) => eprintln!("sigma {}: undercut at m = {n}", RatDisplay(&th.sigma)),
                    (None, ex) => eprintln!(
                        "sigma {}: not reached for m <= {} (extrapolated m ~ {})",
                        RatDisplay(&th.sigma),
                        range.m_max,
                        ex.as_deref().unwrap_or("?")
                    ),
                }
            }
            Ok(cert.complete)
        }
        Command::SbiCheck { cert } => {
            let text = read(&cert)?;
            let parsed = parse_certificate(&text).map_err(|e| format!("{}: {e}", cert.display()))?;
            let findings = audit_certificate(&parsed);
            if findings.is_empty() {
                println!("certificate valid");
                if !parsed.complete {
                    println!("note: incomplete; extrapolated thresholds were not verified");
                }
            } else {
                println!("certificate INVALID");
                for f in &findings {
                    println!("  - {f}");
                }
            }
            Ok(findings.is_empty())
        }
        Command::Cb { cycle_file, d } => {
            let cycle = load_cycle(&cycle_file)?;
            let query = CbQuery::new(cycle, d);
            let failures = cb_failures(&query);
            println!("points = {}", query.cycle.len());
            println!("h0(I_Z({d})) = {}", vanishing_dim(&query.cycle, d));
            println!("cayley-bacharach = {}", failures.is_empty());
            for p in &failures {
                println!("  obstructed at {p}");
            }
            Ok(failures.is_empty())
        }
        Command::CbSum { cycles, degrees, lprime } => {
            let loaded = cycles.iter().map(|p| load_cycle(p)).collect::<Result<Vec<_>, _>>()?;
            let ok = cb_for_direct_sum(&loaded, &degrees, lprime).map_err(|e| e.to_string())?;
            for ((path, cycle), l) in cycles.iter().zip(&loaded).zip(&degrees) {
                let d = serre_degree(*l, lprime);
                let bad = cb_failures(&CbQuery::new(cycle.clone(), d));
                println!(
                    "{}: l = {l}, d = {d}, cayley-bacharach = {}",
                    path.display(),
                    bad.is_empty()
                );
            }
            println!("locally free extension = {ok}");
            Ok(ok)
        }
        Command::Dry { surface, r, c1sq, c2 } => {
            let inv = surface.resolve_valid()?;
            let value = dry_defect(&inv, r, &c1sq, &c2).map_err(|e| e.to_string())?;
            println!("dry_defect = {}", RatDisplay(&value));
            Ok(true)
        }
    }
}

fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
