//! Acceptance suite: one `[PASS]` / `[FAIL]` line per criterion, nonzero
//! exit status if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use fptlab::cli::lemma_rows;
use fptlab::elliptic::{make_curve, supersingular_values, verify_technical_lemma, SearchField};
use fptlab::ff::{is_prime, FieldElement, FiniteField, Fq};
use fptlab::fpt::{bracketing_holds, cross_check, ft_closed_form, nu_levels, NuOptions, NuRecord};
use fptlab::lucas::multinomial_mod_p;
use fptlab::poly::{multi_mul_truncated, Exponent, FrobeniusIdeal, MultiPoly};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

fn exact_binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `Σ C(n, i)^2 a^i` evaluated term by term, with the binomials reduced
/// from exact integers.
fn hasse_oracle(a: &FieldElement) -> FieldElement {
    let field = *a.field();
    let p = field.p();
    let n = (p - 1) / 2;
    let mut acc = field.from_u64(0);
    for i in 0..=n {
        let c = exact_binomial(n, i);
        let c = (&c * &c % p).to_u64().unwrap();
        acc = acc + field.from_u64(c) * a.pow(i);
    }
    acc
}

fn expected_nu(supersingular: bool, p: u64, e: u32) -> u64 {
    let q = p.pow(e);
    if supersingular {
        q - p.pow(e - 1) - 1
    } else {
        q - 1
    }
}

fn grid_params(p: u64) -> Vec<FieldElement> {
    FiniteField::quadratic(p)
        .unwrap()
        .enumerate(1 << 20)
        .unwrap()
        .into_iter()
        .filter(|a| !a.is_zero() && !a.is_one())
        .collect()
}

/// Criterion 1; the ν tables are kept for criterion 8.
fn threshold_grid(tables: &mut Vec<(u64, FieldElement, Vec<NuRecord>)>) -> Outcome {
    let opts = NuOptions::default();
    let mut jobs: Vec<(u64, u32)> = [3u64, 5, 7, 11, 13].iter().map(|&p| (p, 2)).collect();
    jobs.extend([(3u64, 3u32), (5, 3)]);
    let mut curves = 0usize;
    let mut failures = Vec::new();
    for (p, e_max) in jobs {
        let results: Vec<_> = grid_params(p)
            .par_iter()
            .map(|&a| {
                let curve = make_curve(a).unwrap();
                let ss = hasse_oracle(&a).is_zero();
                let expected_ft = if ss {
                    Ratio::new(p - 1, p)
                } else {
                    Ratio::from_integer(1)
                };
                let closed = ft_closed_form(&curve);
                let checked = cross_check(&curve, e_max, &opts);
                (a, ss, expected_ft, closed, checked)
            })
            .collect();
        for (a, ss, expected_ft, closed, checked) in results {
            curves += 1;
            let closed = match closed {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("p={p} a={a}: closed form: {e}"));
                    continue;
                }
            };
            let report = match checked {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("p={p} a={a}: {e}"));
                    continue;
                }
            };
            if closed.ft != expected_ft || report.closed.ft != closed.ft {
                failures.push(format!(
                    "p={p} a={a}: FT {} expected {expected_ft}",
                    closed.ft
                ));
            }
            for rec in &report.estimate.table {
                if rec.nu != expected_nu(ss, p, rec.e) {
                    failures.push(format!(
                        "p={p} a={a} e={}: ν={} expected {}",
                        rec.e,
                        rec.nu,
                        expected_nu(ss, p, rec.e)
                    ));
                }
            }
            if e_max == 2 {
                tables.push((p, a, report.estimate.table));
            }
        }
    }
    if failures.is_empty() {
        ok(format!("{curves} (p, a, e_max) runs"))
    } else {
        fail(failures.join("; "))
    }
}

fn supersingular_counts() -> Outcome {
    let mut bad = Vec::new();
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let values = supersingular_values(p, SearchField::Quadratic, 1 << 20).unwrap();
        let oracle = grid_params(p)
            .iter()
            .filter(|a| hasse_oracle(a).is_zero())
            .count();
        if values.len() as u64 != (p - 1) / 2 || oracle != values.len() {
            bad.push(format!(
                "p={p}: {} found, oracle {oracle}, expected {}",
                values.len(),
                (p - 1) / 2
            ));
        }
    }
    if bad.is_empty() {
        ok("p <= 31")
    } else {
        fail(bad.join("; "))
    }
}

fn lemma_suite() -> Outcome {
    let primes: Vec<u64> = (3..=199).filter(|&p| is_prime(p)).collect();
    let mut failed: Vec<String> = primes
        .par_iter()
        .flat_map_iter(|&p| lemma_rows(p))
        .filter(|r| !r.pass)
        .map(|r| format!("p={:?} {}: {}", r.p, r.check, r.detail))
        .collect();
    failed.extend(
        (1..=60u64)
            .filter(|&n| !fptlab::deuring::check_pascal_connection(n))
            .map(|n| format!("pascal connection n={n}")),
    );
    if failed.is_empty() {
        ok(format!(
            "{} odd primes, Pascal connection n <= 60",
            primes.len()
        ))
    } else {
        fail(failed.join("; "))
    }
}

fn technical_lemma() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for p in [3u64, 5, 7, 11, 13] {
        match verify_technical_lemma(p, 10) {
            Ok(r) if r.passed() => checked += r.checked,
            Ok(r) => bad.push(format!("p={p}: {:?}", r.mismatches)),
            Err(e) => bad.push(format!("p={p}: {e}")),
        }
    }
    if bad.is_empty() {
        ok(format!("{checked} coefficients"))
    } else {
        fail(bad.join("; "))
    }
}

fn lucas_oracle() -> Outcome {
    let mut factorials = vec![BigUint::from(1u32)];
    for i in 1..=2000u64 {
        let next = factorials.last().unwrap() * i;
        factorials.push(next);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ca5);
    let mut bad = Vec::new();
    let mut zeros = 0;
    for p in [3u64, 5, 7] {
        for _ in 0..10_000 {
            let n: u64 = rng.gen_range(0..=2000);
            let r: usize = rng.gen_range(1..=5);
            let mut cuts: Vec<u64> = (0..r - 1).map(|_| rng.gen_range(0..=n)).collect();
            cuts.sort_unstable();
            let mut parts = Vec::with_capacity(r);
            let mut prev = 0;
            for c in cuts.into_iter().chain([n]) {
                parts.push(c - prev);
                prev = c;
            }
            let den = parts
                .iter()
                .fold(BigUint::from(1u32), |acc, &k| acc * &factorials[k as usize]);
            let oracle = (&factorials[n as usize] / den % p).to_u64().unwrap();
            let got = multinomial_mod_p(n, &parts, p).unwrap();
            zeros += usize::from(oracle == 0);
            if got != oracle {
                bad.push(format!("p={p} N={n} parts={parts:?}: {got} vs {oracle}"));
            }
        }
    }
    if bad.is_empty() {
        ok(format!("30000 samples, {zeros} vanishing"))
    } else {
        fail(bad.into_iter().take(5).collect::<Vec<_>>().join("; "))
    }
}

fn random_homogeneous(rng: &mut ChaCha8Rng, degree: u32) -> Vec<(Exponent, u64)> {
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=degree - i {
            if rng.gen_bool(0.4) {
                terms.push(([i, j, degree - i - j], rng.gen_range(1..5)));
            }
        }
    }
    terms
}

fn truncation_oracle() -> Outcome {
    let field = FiniteField::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e5);
    let mut bad = 0usize;
    let mut nonzero = 0usize;
    for trial in 0..500 {
        let e = 1 + (trial % 2) as u32;
        let bound = 5u32.pow(e);
        let (df, dg) = (rng.gen_range(0..=12), rng.gen_range(0..=12));
        let f = random_homogeneous(&mut rng, df);
        let g = random_homogeneous(&mut rng, dg);
        let mut full: BTreeMap<Exponent, u64> = BTreeMap::new();
        for (kf, cf) in &f {
            for (kg, cg) in &g {
                let k = [kf[0] + kg[0], kf[1] + kg[1], kf[2] + kg[2]];
                *full.entry(k).or_insert(0) += cf * cg;
            }
        }
        let oracle: BTreeMap<Exponent, u64> = full
            .into_iter()
            .map(|(k, c)| (k, c % 5))
            .filter(|(k, c)| *c != 0 && k.iter().all(|&x| x < bound))
            .collect();
        let to_poly = |t: &[(Exponent, u64)]| {
            MultiPoly::from_terms(&field, t.iter().map(|&(k, c)| (k, Fq::new(c, 0))))
        };
        let ideal = FrobeniusIdeal::new(5, e).unwrap();
        let got: BTreeMap<Exponent, u64> =
            multi_mul_truncated(&field, &to_poly(&f), &to_poly(&g), &ideal)
                .terms()
                .iter()
                .map(|(k, c)| (*k, c.c0))
                .collect();
        nonzero += usize::from(!oracle.is_empty());
        bad += usize::from(got != oracle);
    }
    if bad == 0 {
        ok(format!("500 pairs, {nonzero} with surviving terms"))
    } else {
        fail(format!("{bad} of 500 pairs differ"))
    }
}

fn char_two() -> Outcome {
    let started = Instant::now();
    let f4 = FiniteField::quadratic(2).unwrap();
    let mut bad = Vec::new();
    for a in f4
        .enumerate(16)
        .unwrap()
        .into_iter()
        .filter(|a| !a.is_zero() && !a.is_one())
    {
        let curve = make_curve(a).unwrap();
        if ft_closed_form(&curve).unwrap().ft != Ratio::new(1, 2) {
            bad.push(format!("a={a}: closed form"));
        }
        let levels = nu_levels(curve.field(), curve.poly(), 6, &NuOptions::default()).unwrap();
        for l in &levels {
            if l.record.nu != (1 << (l.record.e - 1)) - 1 {
                bad.push(format!("a={a} e={}: ν={}", l.record.e, l.record.nu));
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        bad.push(format!("took {elapsed:.2}s"));
    }
    if bad.is_empty() {
        ok("a ∈ {t, 1+t}, e <= 6")
    } else {
        fail(bad.join("; "))
    }
}

fn bracketing(tables: &[(u64, FieldElement, Vec<NuRecord>)]) -> Outcome {
    let bad: Vec<String> = tables
        .iter()
        .filter(|(p, _, t)| t.len() != 2 || !bracketing_holds(t, *p))
        .map(|(p, a, t)| {
            format!(
                "p={p} a={a}: {:?}",
                t.iter().map(|r| r.nu).collect::<Vec<_>>()
            )
        })
        .collect();
    if tables.is_empty() {
        fail("no grid tables")
    } else if bad.is_empty() {
        ok(format!("{} grid tables", tables.len()))
    } else {
        fail(bad.join("; "))
    }
}

fn main() {
    let mut tables = Vec::new();
    let mut all = true;
    let mut report = |label: &str, run: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {label}: {} ({:.1}s)",
            outcome.detail,
            started.elapsed().as_secs_f64()
        );
        all &= outcome.pass;
    };
    report("1. Threshold grid", &mut || threshold_grid(&mut tables));
    report("2. Supersingular counts", &mut supersingular_counts);
    report("3. Lemma suite", &mut lemma_suite);
    report("4. Technical lemma", &mut technical_lemma);
    report("5. Lucas oracle", &mut lucas_oracle);
    report("6. Truncation oracle", &mut truncation_oracle);
    report("7. Characteristic 2", &mut char_two);
    report("8. Bracketing", &mut || bracketing(&tables));
    if !all {
        std::process::exit(1);
    }
}
