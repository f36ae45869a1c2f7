//! Command-line front end. Every subcommand produces one JSON document; with `--out` it goes
//! to that file and timing metadata goes to `<out>.meta.json`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::arith::{self, EulerOptions, NumberField, RayData};
use crate::lattice::{self, LieLattice, RawLattice};
use crate::localring::LocalRingSpec;
use crate::oracle::{self, OracleOptions};
use crate::poincare::{self, LocalZetaSeries, PrimePolicy, ZetaOptions};
use crate::zetafit::{self, BivariateRational, FitBounds};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "nilzeta", version, about = "Representation zeta functions of nilpotent Lie lattices")]
pub struct Cli {
    /// Worker threads for enumeration.
    #[arg(long, global = true, env = "NILZETA_WORKERS")]
    pub workers: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a lattice file and print its invariants.
    Validate {
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Truncated local zeta function at one prime.
    LocalZeta {
        #[arg(long)]
        lattice: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        level_max: Option<u32>,
        #[arg(long, value_enum, default_value_t = Policy::Refuse)]
        policy: Policy,
        /// Disable unit-orbit reduction.
        #[arg(long)]
        full: bool,
        /// Also enumerate one level further and compare.
        #[arg(long)]
        check_stability: bool,
    },
    /// Fit rational functions to local series (from files or computed at `--primes`).
    Fit {
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Series files written by `local-zeta`.
        #[arg(long)]
        series: Vec<PathBuf>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Global coefficients from the fine Euler product.
    Euler {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        n_bound: usize,
        #[arg(long)]
        prime_bound: Option<u64>,
        /// `W(X, Y)` file used for excluded primes and primes at or above `--enumerate-below`.
        #[arg(long)]
        fitted: Option<PathBuf>,
        #[arg(long)]
        enumerate_below: Option<u64>,
        #[arg(long, value_enum, default_value_t = Policy::Refuse)]
        policy: Policy,
    },
    /// Pole set, abscissa and pole order; with a lattice, also asymptotics.
    Analyze {
        /// Rays as JSON, e.g. `[[1,-1]]`.
        #[arg(long)]
        rays: Option<String>,
        /// `W(X, Y)` file from `fit`.
        #[arg(long)]
        fitted: Option<PathBuf>,
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 10_000)]
        n_bound: usize,
    },
    /// Character table and twist counts of a finite quotient.
    Oracle {
        #[arg(long)]
        lattice: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        level: u32,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Oracle twist counts against local zeta coefficients.
    Compare {
        #[arg(long)]
        lattice: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        n_cap: usize,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// End-to-end pipeline on one lattice and field.
    Report {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 10_000)]
        n_bound: usize,
        #[arg(long, default_value_t = 8)]
        enumerate_below: u64,
        /// Prime for a prediction check against fresh enumeration.
        #[arg(long)]
        check_prime: Option<u64>,
        /// Run the oracle comparison at this prime (level 2, n_cap 1).
        #[arg(long)]
        oracle_p: Option<u64>,
        #[command(flatten)]
        caps: CapArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Policy {
    Refuse,
    Local,
    Commensurable,
}

impl From<Policy> for PrimePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Refuse => PrimePolicy::Refuse,
            Policy::Local => PrimePolicy::Local,
            Policy::Commensurable => PrimePolicy::Commensurable,
        }
    }
}

#[derive(Debug, Args)]
pub struct RingArgs {
    #[arg(long)]
    pub p: u64,
    /// Residue degree (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub f: u8,
    /// Ramification index (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub e: u8,
    /// `c0,c1` of the defining polynomial `x² + c1 x + c0`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub g: Option<Vec<i64>>,
}

impl RingArgs {
    fn spec(&self, n: u32) -> Result<LocalRingSpec, Error> {
        let spec = match (self.e, self.f, self.g.as_deref()) {
            (1, 1, _) => LocalRingSpec::rational(self.p, n),
            (1, 2, None) => LocalRingSpec::unramified(self.p, n),
            (e, f, Some(&[c0, c1])) => LocalRingSpec { p: self.p, e, f, n, g: vec![c0, c1, 1] },
            _ => return Err(Error::Usage("e = 2 needs --g c0,c1".into())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 4)]
    pub a_max: u32,
    #[arg(long, default_value_t = 6)]
    pub b_max: u32,
    #[arg(long, default_value_t = 4)]
    pub max_factors: usize,
    #[arg(long, default_value_t = 8)]
    pub deg_max: usize,
}

impl BoundArgs {
    fn bounds(&self) -> FitBounds {
        FitBounds { a_max: self.a_max, b_max: self.b_max, max_factors: self.max_factors, deg_max: self.deg_max, deg_x_max: self.deg_max }
    }
}

#[derive(Debug, Args)]
pub struct CapArgs {
    #[arg(long, default_value_t = 4096)]
    pub max_order: usize,
    #[arg(long, default_value_t = 200)]
    pub max_classes: usize,
}

impl CapArgs {
    fn options(&self) -> OracleOptions {
        OracleOptions { max_order: self.max_order, max_classes: self.max_classes }
    }
}

fn read_lattice(path: &Path) -> Result<LieLattice, Error> {
    LieLattice::from_json(&std::fs::read_to_string(path)?)
}

fn read_json(path: &Path) -> Result<Value, Error> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn parse_field(s: &str) -> Result<NumberField, Error> {
    NumberField::parse(s).ok_or_else(|| Error::Usage(format!("unknown field {s:?}; use Q, Q(i) or Q(sqrt(d))")))
}

fn rat(r: &Rational64) -> String {
    r.to_string()
}

fn parse_rays(text: &str) -> Result<RayData, Error> {
    let v: Value = serde_json::from_str(text)?;
    let parse = |x: &Value| -> Option<Rational64> {
        match x {
            Value::Number(n) => Some(Rational64::from_integer(n.as_i64()?)),
            Value::String(s) => match s.split_once('/') {
                Some((a, b)) => Some(Rational64::new(a.trim().parse().ok()?, b.trim().parse().ok()?)),
                None => Some(Rational64::from_integer(s.trim().parse().ok()?)),
            },
            _ => None,
        }
    };
    let bad = || Error::Usage("rays must be [[A, B], …]".into());
    let mut terms = Vec::new();
    for r in v.as_array().ok_or_else(bad)? {
        let r = r.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
        terms.push(arith::RayTerm::single(parse(&r[0]).ok_or_else(bad)?, parse(&r[1]).ok_or_else(bad)?));
    }
    Ok(RayData { terms })
}

fn series_json(s: &LocalZetaSeries) -> Value {
    serde_json::to_value(s).expect("series serializes")
}

fn coeff_json(c: &[u128]) -> Value {
    Value::Array(c.iter().map(|x| Value::String(x.to_string())).collect())
}

fn abscissa_json(rays: &RayData, poles: &[Rational64]) -> Result<Value, Error> {
    let a = rays.global_abscissa_above(poles)?;
    Ok(json!({
        "a": rat(&a.value),
        "beta": rays.pole_order()?,
        "P": poles.iter().map(rat).collect::<Vec<_>>(),
        "alphas": a.alphas.iter().map(rat).collect::<Vec<_>>(),
    }))
}

fn asymptotics_json(g: &arith::GlobalCoefficients, a: f64, beta: u32) -> Result<Value, Error> {
    let est = arith::asymptotics(g, a, beta)?;
    let emp = arith::estimate_abscissa_empirical(g)?;
    Ok(json!({
        "diagnostic": true,
        "c": est.c,
        "error": est.error,
        "kappa": est.kappa,
        "empirical_abscissa": emp,
    }))
}

/// Runs one parsed command and returns its primary JSON output.
pub fn execute(cli: &Cli) -> Result<Value, Error> {
    match &cli.command {
        Command::Validate { lattice } => {
            let raw: RawLattice = serde_json::from_value(read_json(lattice)?)?;
            let lat = lattice::validate(&raw)?;
            let g = lattice::global_basis(&lat);
            Ok(json!({
                "valid": true,
                "name": lat.name(),
                "rank": lat.rank(),
                "class": lat.class(),
                "lower_central_ranks": lat.lower_central_ranks(),
                "d": g.d,
                "k": g.k,
                "r": g.r,
                "divisors": g.divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "isolator_index": g.isolator_index.to_string(),
            }))
        }
        Command::LocalZeta { lattice, ring, n_max, level_max, policy, full, check_stability } => {
            let lat = read_lattice(lattice)?;
            let spec = ring.spec(1)?;
            let opts = ZetaOptions { level_max: *level_max, policy: (*policy).into(), full_enumeration: *full };
            let s = poincare::local_zeta(&lat, &spec, *n_max, opts)?;
            let mut out = series_json(&s);
            if *check_stability {
                let st = poincare::stabilization_check(&lat, &spec, *n_max, s.level_max, (*policy).into())?;
                out["stability"] = serde_json::to_value(st)?;
            }
            Ok(out)
        }
        Command::Fit { lattice, primes, n_max, series, bounds } => {
            let bounds = bounds.bounds();
            let mut data: Vec<(u64, LocalZetaSeries)> = Vec::new();
            for path in series {
                let v = read_json(path)?;
                let s = LocalZetaSeries::from_json(&v).ok_or_else(|| Error::Usage(format!("{} is not a series file", path.display())))?;
                data.push((s.q, s));
            }
            if let Some(path) = lattice {
                let lat = read_lattice(path)?;
                for &p in primes {
                    let s = poincare::local_zeta(&lat, &LocalRingSpec::rational(p, 1), *n_max, ZetaOptions::default())?;
                    data.push((p, s));
                }
            }
            if data.is_empty() {
                return Err(Error::Usage("give --series files or --lattice with --primes".into()));
            }
            fit_json(&data, &bounds)
        }
        Command::Euler { lattice, field, n_bound, prime_bound, fitted, enumerate_below, policy } => {
            let lat = read_lattice(lattice)?;
            let field = parse_field(field)?;
            let fitted = fitted.as_deref().map(|p| read_json(p).and_then(|v| Ok(BivariateRational::from_json(&v)?))).transpose()?;
            let opts = EulerOptions { policy: (*policy).into(), fitted, enumerate_below: *enumerate_below };
            let g = arith::euler_product(&lat, &field, prime_bound.unwrap_or(*n_bound as u64), *n_bound, &opts)?;
            Ok(euler_json(&field, &g))
        }
        Command::Analyze { rays, fitted, lattice, field, n_bound } => {
            let w = fitted.as_deref().map(|p| read_json(p).and_then(|v| Ok(BivariateRational::from_json(&v)?))).transpose()?;
            let (data, poles) = match (rays, &w) {
                (Some(text), _) => {
                    let d = parse_rays(text)?;
                    let mut poles: Vec<Rational64> = d.terms.iter().flat_map(|t| t.rays.iter().map(|r| -r.1 / r.0)).collect();
                    poles.sort();
                    poles.dedup();
                    (d, poles)
                }
                (None, Some(w)) => (RayData::from_fit(w), arith::local_pole_set(w)),
                (None, None) => return Err(Error::Usage("give --rays or --fitted".into())),
            };
            let mut out = abscissa_json(&data, &poles)?;
            if let Some(path) = lattice {
                let lat = read_lattice(path)?;
                let field = parse_field(field)?;
                let opts = EulerOptions { fitted: w, ..Default::default() };
                let g = arith::euler_product(&lat, &field, *n_bound as u64, *n_bound, &opts)?;
                let a = data.global_abscissa()?.value;
                let a = *a.numer() as f64 / *a.denom() as f64;
                out["asymptotics"] = asymptotics_json(&g, a, data.pole_order()?)?;
            }
            Ok(out)
        }
        Command::Oracle { lattice, ring, level, caps } => {
            let lat = read_lattice(lattice)?;
            Ok(serde_json::to_value(oracle::oracle_report(&lat, &ring.spec(*level)?, &caps.options())?)?)
        }
        Command::Compare { lattice, ring, level, n_cap, caps } => {
            let lat = read_lattice(lattice)?;
            Ok(serde_json::to_value(oracle::compare_oracle_poincare(&lat, &ring.spec(*level)?, *n_cap, &caps.options())?)?)
        }
        Command::Report { lattice, field, primes, n_max, n_bound, enumerate_below, check_prime, oracle_p, caps } => {
            report(&read_lattice(lattice)?, &parse_field(field)?, primes, *n_max, *n_bound, *enumerate_below, *check_prime, *oracle_p, &caps.options())
        }
    }
}

fn fit_json(data: &[(u64, LocalZetaSeries)], bounds: &FitBounds) -> Result<Value, Error> {
    let mut uni = Vec::new();
    for (q, s) in data {
        let entry = match zetafit::fit_univariate(s, bounds) {
            Ok(f) => json!({"q": q, "display": f.to_string(), "fit": f.to_json()}),
            Err(e) => json!({"q": q, "error": e.to_string()}),
        };
        uni.push(entry);
    }
    let mut out = json!({"univariate": uni});
    if data.len() >= 3 {
        let w = zetafit::fit_uniform(data, bounds)?;
        let fe = zetafit::check_functional_equation(&w);
        let verified = fe.map(|c| zetafit::verify_functional_equation(&w, &c, 16, 7));
        out["uniform"] = json!({
            "display": w.to_string(),
            "W": w.to_json(),
            "functional_equation": fe,
            "functional_equation_verified": verified,
            "P": arith::local_pole_set(&w).iter().map(rat).collect::<Vec<_>>(),
        });
    }
    Ok(out)
}

fn euler_json(field: &NumberField, g: &arith::GlobalCoefficients) -> Value {
    let overrides: Vec<Value> = g.overrides().map(|f| json!({"p": f.p, "e": f.e, "f": f.f, "excluded": f.excluded})).collect();
    let coarse = arith::coarse_factor_check(g, 50);
    json!({
        "field": field.name(),
        "n_bound": g.n_bound,
        "coeffs": coeff_json(&g.coeffs[1..]),
        "overrides": overrides,
        "multiplicative": arith::multiplicativity_violation(g).is_none(),
        "coarse_factors_match": coarse.iter().all(|c| c.matches),
    })
}

#[allow(clippy::too_many_arguments)]
fn report(
    lat: &LieLattice,
    field: &NumberField,
    primes: &[u64],
    n_max: usize,
    n_bound: usize,
    enumerate_below: u64,
    check_prime: Option<u64>,
    oracle_p: Option<u64>,
    caps: &OracleOptions,
) -> Result<Value, Error> {
    let g = lattice::global_basis(lat);
    let mut local = Vec::new();
    let mut skipped = Vec::new();
    for &p in primes {
        match poincare::local_zeta_with(lat, Some(&g), &LocalRingSpec::rational(p, 1), n_max, ZetaOptions::default()) {
            Ok(s) => local.push((p, s)),
            Err(e) => skipped.push(json!({"p": p, "reason": e.to_string()})),
        }
    }
    let bounds = FitBounds::default();
    let w = zetafit::fit_uniform(&local, &bounds)?;
    let fe = zetafit::check_functional_equation(&w);
    let mut out = json!({
        "lattice": {"name": lat.name(), "rank": lat.rank(), "class": lat.class(), "isolator_index": g.isolator_index.to_string()},
        "field": field.name(),
        "local": local.iter().map(|(_, s)| series_json(s)).collect::<Vec<_>>(),
        "skipped_primes": skipped,
        "W": {"display": w.to_string(), "json": w.to_json()},
        "functional_equation": fe,
        "functional_equation_verified": fe.map(|c| zetafit::verify_functional_equation(&w, &c, 16, 7)),
    });
    if let Some(p) = check_prime {
        let fresh = poincare::local_zeta(lat, &LocalRingSpec::rational(p, 1), n_max.min(3), ZetaOptions::default())?;
        let pred = zetafit::predict(&w, p, fresh.n_max)?;
        out["prediction_check"] = json!({"q": p, "predicted": series_json(&pred)["coeffs"], "enumerated": series_json(&fresh)["coeffs"], "matches": pred.coeffs == fresh.coeffs});
    }
    let rays = RayData::from_fit(&w);
    let poles = arith::local_pole_set(&w);
    out["abscissa"] = abscissa_json(&rays, &poles)?;
    let opts = EulerOptions { fitted: Some(w), enumerate_below: Some(enumerate_below), ..Default::default() };
    let coeffs = arith::euler_product(lat, field, n_bound as u64, n_bound, &opts)?;
    out["euler"] = euler_json(field, &coeffs);
    let a = rays.global_abscissa()?.value;
    let a = *a.numer() as f64 / *a.denom() as f64;
    out["asymptotics"] = match asymptotics_json(&coeffs, a, rays.pole_order()?) {
        Ok(v) => v,
        Err(e) => json!({"diagnostic": true, "error": e.to_string()}),
    };
    if let Some(p) = oracle_p {
        out["oracle"] = serde_json::to_value(oracle::compare_oracle_poincare(lat, &LocalRingSpec::rational(p, 2), 1, caps)?)?;
    }
    Ok(out)
}

/// `{"error": <variant>, "module": …, "message": …, "detail": …}`.
pub fn error_json(e: &Error) -> Value {
    let debug = format!("{e:?}");
    let (module, rest) = debug.split_once('(').unwrap_or((debug.as_str(), ""));
    let kind: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
    json!({
        "error": if kind.is_empty() { module.to_string() } else { kind },
        "module": module.to_lowercase(),
        "message": e.to_string(),
        "detail": debug,
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(|e| Error::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Parses arguments, runs, and returns `(exit code, primary output)`.
pub fn run_captured<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => return (if e.use_stderr() { 2 } else { 0 }, e.to_string()),
    };
    let started = Instant::now();
    let result = with_pool(cli.workers, || execute(&cli)).and_then(|r| r);
    let (code, body) = match &result {
        Ok(v) => (0, pretty(v)),
        Err(e) => (2, pretty(&error_json(e))),
    };
    if let Some(path) = &cli.out {
        let meta = json!({
            "command": format!("{:?}", cli.command).split([' ', '{']).next().unwrap_or_default(),
            "workers": cli.workers.unwrap_or_else(rayon::current_num_threads),
            "elapsed_seconds": started.elapsed().as_secs_f64(),
            "finished_unix": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            "exit_code": code,
        });
        let mut meta_path = path.clone().into_os_string();
        meta_path.push(".meta.json");
        if let Err(e) = std::fs::write(path, &body).and_then(|_| std::fs::write(&meta_path, pretty(&meta))) {
            return (2, pretty(&error_json(&Error::Io(e))));
        }
    }
    (code, body)
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let to_file = args.iter().any(|a| a == "--out");
    let (code, body) = run_captured(args);
    if !body.trim_start().starts_with('{') {
        // clap usage or help text
        if code == 0 { print!("{body}") } else { eprint!("{body}") }
    } else if code != 0 || !to_file {
        print!("{body}");
    }
    code
}
