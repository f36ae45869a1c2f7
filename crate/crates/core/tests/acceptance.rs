//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any failure not listed in
//! `KNOWN_FAILURES`.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use nilzeta::arith::{self, EulerOptions, NumberField, RayData};
use nilzeta::cli::run_captured;
use nilzeta::localring::{LocalRingSpec, Ring};
use nilzeta::oracle::{self, OracleOptions};
use nilzeta::poincare::{self, PrimePolicy, ZetaOptions};
use nilzeta::zetafit::{self, BivariateRational, FitBounds, FunctionalEquation};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criterion 6 over Q(i): the stated constant omits the residue of the Dedekind zeta function.
const KNOWN_FAILURES: &[&str] = &["6b"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { id, pass, detail: detail.into() }
}

fn rel(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

fn c1_heisenberg_local() -> Vec<Outcome> {
    let t = Instant::now();
    let mut bad = Vec::new();
    for p in [2u64, 3, 5] {
        // (1 - t)/(1 - pt) = 1 + Σ_{n ≥ 1} (p - 1) p^{n-1} t^n
        let expect: Vec<u128> = (0..=4u32).map(|n| if n == 0 { 1 } else { (p as u128 - 1) * (p as u128).pow(n - 1) }).collect();
        let got = series(&heis(), &LocalRingSpec::rational(p, 1), 4, PrimePolicy::Refuse);
        if got != expect {
            bad.push(format!("p={p}: {got:?} vs {expect:?}"));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = bad.is_empty() && secs < 60.0;
    vec![outcome("1", pass, format!("Heisenberg local factors at p = 2, 3, 5, n <= 4 {} ({secs:.2}s)", if bad.is_empty() { "exact".into() } else { bad.join("; ") }))]
}

fn heisenberg_w() -> BivariateRational {
    let one = BigRational::from_integer(BigInt::from(1));
    let mut num = zetafit::Poly2::one();
    num.add_term(0, 1, -one);
    BivariateRational::new(num, vec![(1, 1)])
}

fn sample_points() -> Vec<(BigRational, BigRational)> {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    vec![(r(3, 1), r(1, 7)), (r(-2, 5), r(4, 3)), (r(11, 2), r(-1, 9)), (r(5, 7), r(3, 5))]
}

fn c2_fit_predict() -> Vec<Outcome> {
    let data: Vec<_> = [2u64, 3, 5, 7]
        .into_iter()
        .map(|p| (p, poincare::local_zeta(&heis(), &LocalRingSpec::rational(p, 1), 4, ZetaOptions::default()).unwrap()))
        .collect();
    let w = zetafit::fit_uniform(&data, &FitBounds::default()).unwrap();
    // compare against (1 - y)/(1 - xy) evaluated directly
    let values_agree = sample_points().iter().all(|(x, y)| {
        let one = BigRational::from_integer(1.into());
        w.eval(x, y) == Some((&one - y) / (&one - x * y))
    });
    let exact = w == heisenberg_w() && values_agree;
    let fresh = poincare::local_zeta(&heis(), &LocalRingSpec::rational(11, 1), 3, ZetaOptions::default()).unwrap();
    let pred = zetafit::predict(&w, 11, 3).unwrap();
    let pass = exact && pred.coeffs == fresh.coeffs;
    vec![outcome(
        "2",
        pass,
        format!("fit over q = 2, 3, 5, 7 gives {w}; predict(11) {:?} vs enumerated {:?}", pred.coeffs_u128(), fresh.coeffs_u128()),
    )]
}

fn c3_functional_equation() -> Vec<Outcome> {
    let w = heisenberg_w();
    let cert = zetafit::check_functional_equation(&w);
    let one = BigRational::from_integer(1.into());
    let exact = sample_points().iter().all(|(x, y)| {
        let lhs = w.eval(&(&one / x), &(&one / y));
        let rhs = w.eval(x, y).map(|v| x * v);
        lhs.is_some() && lhs == rhs
    });
    let pass = cert == Some(FunctionalEquation { sign: 1, a: 1, b: 0 }) && exact;
    vec![outcome("3", pass, format!("W(1/X, 1/Y) = X W(X, Y): certificate {cert:?}, exact evaluation agrees: {exact}"))]
}

/// `a_L(n) = Σ_{d | n} χ_{-4}(d)`, the number of ideals of norm `n` in `Z[i]`.
fn gaussian_ideal_counts(n: usize) -> Vec<i128> {
    let chi = |d: usize| match d % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    };
    let mut a = vec![0i128; n + 1];
    for d in 1..=n {
        let c = chi(d);
        if c != 0 {
            for m in (d..=n).step_by(d) {
                a[m] += c;
            }
        }
    }
    a
}

/// Coefficients of `ζ_{Q(i)}(s - 1)/ζ_{Q(i)}(s)` by Dirichlet convolution.
fn gaussian_heisenberg_oracle(n: usize) -> Vec<i128> {
    let a = gaussian_ideal_counts(n);
    let mut inv = vec![0i128; n + 1];
    inv[1] = 1;
    for m in 1..=n {
        let v = if m == 1 { 1 } else { -inv[m] };
        inv[m] = v;
        for k in (2 * m..=n).step_by(m) {
            inv[k] += a[k / m] * v;
        }
    }
    let mut out = vec![0i128; n + 1];
    for d in 1..=n {
        if a[d] != 0 {
            for m in (d..=n).step_by(d) {
                out[m] += d as i128 * a[d] * inv[m / d];
            }
        }
    }
    out
}

fn c4_fine_euler() -> Vec<Outcome> {
    let n = 10_000;
    let g = arith::euler_product(&heis(), &NumberField::gaussian(), n as u64, n, &EulerOptions::default()).unwrap();
    let oracle = gaussian_heisenberg_oracle(n);
    let matches_oracle = (1..=n).all(|k| g.coeffs[k] as i128 == oracle[k]);
    let violation = arith::multiplicativity_violation(&g);
    let coarse = arith::coarse_factor_check(&g, 50);
    let coarse_ok = coarse.iter().all(|c| c.matches);
    let pass = violation.is_none() && coarse_ok && matches_oracle;
    vec![outcome(
        "4",
        pass,
        format!(
            "Q(i), N_bound = {n}: coprime violation {violation:?}, coarse factors at {} primes <= 50 match: {coarse_ok}, equals zeta_L(s-1)/zeta_L(s): {matches_oracle}",
            coarse.len()
        ),
    )]
}

fn c5_abscissa() -> Vec<Outcome> {
    let bounds = FitBounds::default();
    let over_q: Vec<_> = [2u64, 3, 5, 7]
        .into_iter()
        .map(|p| (p, poincare::local_zeta(&heis(), &LocalRingSpec::rational(p, 1), 4, ZetaOptions::default()).unwrap()))
        .collect();
    // one prime ideal above each of 2 (ramified), 3 (inert), 5 and 13 (split)
    let over_gauss: Vec<_> = [2u64, 3, 5, 13]
        .into_iter()
        .map(|p| {
            let ideal = arith::split_prime(&NumberField::gaussian(), p).ideals.remove(0);
            let s = poincare::local_zeta(&heis(), &ideal.spec, 4, ZetaOptions::default()).unwrap();
            (ideal.norm(), s)
        })
        .collect();
    let mut results = Vec::new();
    for data in [&over_q, &over_gauss] {
        let w = zetafit::fit_uniform(data, &bounds).unwrap();
        let rays = RayData::from_fit(&w);
        let poles = arith::local_pole_set(&w);
        let a = rays.global_abscissa_above(&poles).map(|a| a.value);
        results.push((a, rays.pole_order().ok(), poles));
    }
    let (a, beta, poles) = results[0].clone();
    let int = |x: i64| Rational64::from_integer(x);
    let strict = matches!((&a, poles.last()), (Ok(a), Some(m)) if a > m);
    let pass = a == Ok(int(2)) && beta == Some(1) && poles == vec![int(1)] && strict && results[0] == results[1];
    vec![outcome(
        "5",
        pass,
        format!(
            "a(G) = {}, beta = {:?}, P = {:?}, a(G) > max P: {strict}; Q(i) gives a = {}, beta = {:?}",
            a.as_ref().map(|x| x.to_string()).unwrap_or_else(|e| e.to_string()),
            beta,
            poles.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            results[1].0.as_ref().map(|x| x.to_string()).unwrap_or_else(|e| e.to_string()),
            results[1].1
        ),
    )]
}

/// `ζ_{Q(i)}(2) = Σ a_L(n)/n²` with the tail `≈ (π/4)/M` added back.
fn gaussian_zeta2(m: usize) -> f64 {
    let a = gaussian_ideal_counts(m);
    let s: f64 = (1..=m).rev().map(|n| a[n] as f64 / (n as f64 * n as f64)).sum();
    s + PI / 4.0 / m as f64
}

fn c6_tauberian() -> Vec<Outcome> {
    let t = Instant::now();
    let n = 100_000;
    let q = arith::euler_product(&heis(), &NumberField::Rationals, n as u64, n, &EulerOptions::default()).unwrap();
    let cq = arith::asymptotics(&q, 2.0, 1).unwrap();
    let target_q = 3.0 / (PI * PI);
    let g = arith::euler_product(&heis(), &NumberField::gaussian(), n as u64, n, &EulerOptions::default()).unwrap();
    let cg = arith::asymptotics(&g, 2.0, 1).unwrap();
    let z2 = gaussian_zeta2(2_000_000);
    let lib_z2 = arith::dedekind_zeta2(&NumberField::gaussian());
    let target_g = 1.0 / (2.0 * z2);
    // the residue of ζ_{Q(i)} at s = 1 is π/4
    let corrected = PI / 4.0 / (2.0 * z2);
    let secs = t.elapsed().as_secs_f64();
    vec![
        outcome("6a", rel(cq.c, target_q) < 0.01 && secs < 120.0, format!("Q: c = {:.7} vs 3/pi^2 = {target_q:.7}, rel. error {:.2e} (tol 1e-2)", cq.c, rel(cq.c, target_q))),
        outcome(
            "6b",
            rel(cg.c, target_g) < 0.03 && secs < 120.0,
            format!(
                "Q(i): c = {:.7} vs 1/(2 zeta_L(2)) = {target_g:.7} (zeta_L(2) = {z2:.9}, library {lib_z2:.9}), rel. error {:.3} (tol 3e-2) ({secs:.1}s)",
                cg.c,
                rel(cg.c, target_g)
            ),
        ),
        outcome("6c", rel(cg.c, corrected) < 0.03, format!("Q(i) diagnostic: c vs (pi/4)/(2 zeta_L(2)) = {corrected:.7}, rel. error {:.2e}", rel(cg.c, corrected))),
    ]
}

fn c7_oracle() -> Vec<Outcome> {
    let t = Instant::now();
    let opts = OracleOptions { max_order: 20_000, max_classes: 1000 };
    let mut out = Vec::new();
    let r = oracle::oracle_report(&heis(), &LocalRingSpec::rational(3, 1), &opts).unwrap();
    let p = 3usize;
    // Heis(F_p): centre of size p plus (p³ - p)/p classes of size p; p² linear characters
    // and p - 1 of degree p, all degree-p ones twist-equivalent only to themselves
    let classes = p + (p * p * p - p) / p;
    let degrees = BTreeMap::from([(1u64, p * p), (p as u64, p - 1)]);
    let twists = BTreeMap::from([(1u64, 1usize), (p as u64, p - 1)]);
    let r1 = series(&heis(), &LocalRingSpec::rational(3, 1), 1, PrimePolicy::Refuse)[1];
    let pass = r.classes == classes && r.degrees == degrees && r.twist_counts == twists && r.twist_counts[&3] as u128 == r1;
    out.push(outcome(
        "7a",
        pass,
        format!("Heis(Z/3): {} classes, degrees {:?}, twist counts {:?}, poincare r1 = {r1}", r.classes, r.degrees, r.twist_counts),
    ));
    let free = corpus("free_class2_3gen");
    let cases: Vec<(&str, nilzeta::lattice::LieLattice, u64, u32)> =
        vec![("heis", heis(), 3, 1), ("heis", heis(), 3, 2), ("heis", heis(), 5, 1), ("heis", heis(), 5, 2), ("free", free, 3, 1)];
    let mut lines = Vec::new();
    let mut all = true;
    for (name, lat, p, n) in cases {
        match oracle::compare_oracle_poincare(&lat, &LocalRingSpec::rational(p, n), (n / 2) as usize, &opts) {
            Ok(c) => {
                all &= c.stable;
                lines.push(format!("{name} p={p} N={n}: |G|={} classes={} {:?}", c.report.order, c.report.classes, c.oracle));
            }
            Err(e) => {
                all = false;
                lines.push(format!("{name} p={p} N={n}: {e}"));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    out.push(outcome("7b", all && secs < 300.0, format!("desk matrix: {} ({secs:.1}s)", lines.join("; "))));
    out
}

fn c8_properties() -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for (lat, p) in corpus_cases() {
        let s = poincare::local_zeta(&lat, &LocalRingSpec::rational(p, 1), 2, ZetaOptions::default()).unwrap();
        // coefficients are BigInt, so nonnegativity and r̃₀ = 1 are what remain to check
        if s.coeffs[0] != 1.into() || s.coeffs.iter().any(|c| c < &BigInt::from(0)) {
            bad.push(format!("{:?}", lat.name()));
        }
    }
    out.push(outcome("8a", bad.is_empty(), format!("corpus coefficients nonnegative integers with r0 = 1 {bad:?}")));

    let mut bad = Vec::new();
    for (lat, p) in corpus_cases() {
        for spec in [LocalRingSpec::rational(p, 1), LocalRingSpec::unramified(p, 1)] {
            let levels = if spec.f == 2 && lat.rank() > 4 { 1 } else { 2 };
            if !orbit_reduction_agrees(&lat, &spec, levels) {
                bad.push(format!("{:?} q={}", lat.name(), spec.q()));
            }
        }
    }
    out.push(outcome("8b", bad.is_empty(), format!("unit-orbit reduction equals full enumeration over the corpus {bad:?}")));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut changes = 0;
    let mut matrices = 0;
    for spec in [LocalRingSpec::rational(2, 3), LocalRingSpec::rational(3, 2), LocalRingSpec::unramified(2, 2), LocalRingSpec::ramified(3, 3, 0, 3)] {
        let ring = Ring::new(&spec).unwrap();
        for (rows, cols) in [(3, 3), (2, 4), (4, 3)] {
            let m = random_matrix(&ring, rows, cols, &mut rng);
            changes += snf_type_changes(&ring, &m, 100, &mut rng);
            matrices += 1;
        }
    }
    out.push(outcome("8c", changes == 0, format!("SNF type invariant under 100 transforms for each of {matrices} matrices ({changes} changes)")));

    let mut bad = Vec::new();
    for (lat, p) in corpus_cases() {
        let spec = LocalRingSpec::rational(p, 1);
        if series(&lat, &spec, 2, PrimePolicy::Refuse) != series(&lat.plus_abelian(1), &spec, 2, PrimePolicy::Refuse) {
            bad.push(format!("{:?}", lat.name()));
        }
    }
    out.push(outcome("8d", bad.is_empty(), format!("local_zeta(L + Z) = local_zeta(L) over the corpus {bad:?}")));

    let mut bad = Vec::new();
    for q in [2u64, 3] {
        let spec = LocalRingSpec::rational(q, 1);
        // Heisenberg rescaled by p: twist classes of dimension p^n ≥ p are central characters
        // of exact level n + 1 modulo the level-1 ones, so H has the same series as G
        let h = series_to_level(&heis().rescale(1, q), &spec, 2, 4);
        let closed: Vec<u128> = (0..=2u32).map(|n| if n == 0 { 1 } else { (q as u128 - 1) * (q as u128).pow(n - 1) }).collect();
        if h != closed || commensurability_violation(&heis(), &spec, 2).is_some() {
            bad.push(format!("q={q}: H {h:?}"));
        }
    }
    out.push(outcome("8e", bad.is_empty(), format!("commensurability inequality for Heisenberg at q = 2, 3, n <= 2 {bad:?}")));
    out
}

fn c9_determinism() -> Vec<Outcome> {
    let root = env!("CARGO_MANIFEST_DIR");
    let heis = format!("{root}/corpus/heisenberg.json");
    let free = format!("{root}/corpus/free_class2_3gen.json");
    let bad = format!("{root}/corpus/bad_jacobi.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--lattice", &bad],
        vec!["local-zeta", "--lattice", &heis, "--p", "5", "--n-max", "4", "--check-stability"],
        vec!["local-zeta", "--lattice", &free, "--p", "3", "--n-max", "2"],
        vec!["fit", "--lattice", &heis, "--primes", "2,3,5,7"],
        vec!["euler", "--lattice", &heis, "--field", "Q(i)", "--n-bound", "10000"],
        vec!["analyze", "--rays", "[[1,-1]]"],
        vec!["oracle", "--lattice", &heis, "--p", "3", "--level", "2"],
        vec!["compare", "--lattice", &heis, "--p", "3", "--level", "2", "--n-cap", "1"],
        vec!["report", "--lattice", &heis, "--field", "Q(i)", "--n-bound", "10000", "--check-prime", "11"],
    ];
    let mut differing = Vec::new();
    for args in &runs {
        let go = |w: &str| {
            let mut full = vec!["nilzeta", "--workers", w];
            full.extend(args.iter().copied());
            run_captured(full)
        };
        if go("1") != go("8") {
            differing.push(args[0]);
        }
    }
    vec![outcome("9", differing.is_empty(), format!("{} CLI runs byte-identical across --workers 1 and 8 {differing:?}", runs.len()))]
}

type Suite = fn() -> Vec<Outcome>;

fn main() {
    let suites: [(&str, Suite); 9] = [
        ("heisenberg local factors", c1_heisenberg_local),
        ("uniform fit and prediction", c2_fit_predict),
        ("functional equation", c3_functional_equation),
        ("fine Euler product", c4_fine_euler),
        ("abscissa", c5_abscissa),
        ("Tauberian constant", c6_tauberian),
        ("oracle equivalence", c7_oracle),
        ("property suites", c8_properties),
        ("determinism", c9_determinism),
    ];
    let mut unexpected = Vec::new();
    for (name, run) in suites {
        for o in run() {
            let known = KNOWN_FAILURES.contains(&o.id);
            let tag = match (o.pass, known) {
                (true, _) => "PASS",
                (false, true) => "FAIL (known)",
                (false, false) => "FAIL",
            };
            println!("{tag} [{}] {name}: {}", o.id, o.detail);
            if !o.pass && !known {
                unexpected.push(o.id);
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
