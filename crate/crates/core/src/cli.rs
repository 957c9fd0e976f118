//! The `fptlab` command line: argument grammar, run configuration and
//! report rendering.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::deuring::{
    check_no_repeated_roots, check_ode, check_p_minus_one, check_pascal_connection,
    check_shared_roots, deuring_lucas_factorization, deuring_poly, LucasFactor,
};
use crate::elliptic::{
    make_curve, supersingular_values, verify_technical_lemma, LegendreCurve, SearchField,
};
use crate::error::{Error, Result};
use crate::ff::{is_prime, FieldElement, FiniteField};
use crate::fpt::{self, FtClass, FtResult, NuOptions, NuRecord, DEFAULT_TERM_BUDGET};
use crate::poly::{Exponent, PolyRing};

const ENUMERATION_CAP: u64 = 1 << 24;

#[derive(Parser, Debug)]
#[command(
    name = "fptlab",
    version,
    about = "F-pure thresholds of Legendre cubics over finite fields"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Emit a JSON array of records
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV with a header row
    #[arg(long, global = true)]
    csv: bool,
    /// Largest number of (k_x, k_y) slots a truncated power may use
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET)]
    term_budget: u64,
    /// Worker threads for grid computations (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ν(p^e) for the curve with parameter a
    Nu {
        #[arg(long = "p")]
        p: u64,
        #[arg(long = "a")]
        a: String,
        /// Read a in F_{p^2} instead of F_p
        #[arg(long)]
        ext: bool,
        #[arg(long = "e")]
        e: u32,
    },
    /// F-pure threshold by closed form, by the ν sequence, or both
    Ft {
        #[arg(long = "p")]
        p: u64,
        #[arg(long = "a")]
        a: String,
        #[arg(long)]
        ext: bool,
        #[arg(long, default_value_t = 2)]
        emax: u32,
        #[arg(long, conflicts_with_all = ["brute", "both"])]
        closed: bool,
        #[arg(long, conflicts_with = "both")]
        brute: bool,
        #[arg(long)]
        both: bool,
    },
    /// Supersingular Legendre parameters
    SsList {
        #[arg(long = "p")]
        p: u64,
        #[arg(long, value_enum, default_value_t = FieldChoice::P2)]
        field: FieldChoice,
    },
    /// The Deuring polynomial H{n} over F_p
    Deuring {
        #[arg(long = "n")]
        n: u64,
        #[arg(long = "p")]
        p: u64,
        /// Evaluate at an element of F_p or F_{p^2}
        #[arg(long)]
        eval: Option<String>,
        /// Show the Lucas factorization
        #[arg(long)]
        factor: bool,
    },
    /// Run the identity, technical-lemma and threshold checks over a prime range
    Verify {
        #[arg(long)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Deepest level for the threshold suite (odd primes)
        #[arg(long, default_value_t = 2)]
        emax: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FieldChoice {
    #[value(name = "p")]
    P,
    #[value(name = "p2")]
    P2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemmas,
    Technical,
    Fpt,
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub term_budget: u64,
    pub output: OutputFormat,
    pub parallelism: Option<usize>,
}

impl RunConfig {
    pub const MIN_TERM_BUDGET: u64 = 1000;

    pub fn new(
        term_budget: u64,
        output: OutputFormat,
        parallelism: Option<usize>,
    ) -> std::result::Result<Self, String> {
        if term_budget < Self::MIN_TERM_BUDGET {
            return Err(format!(
                "--term-budget must be at least {}, got {term_budget}",
                Self::MIN_TERM_BUDGET
            ));
        }
        if parallelism == Some(0) {
            return Err("--threads must be positive".into());
        }
        Ok(RunConfig {
            term_budget,
            output,
            parallelism,
        })
    }

    fn nu_options(&self) -> NuOptions {
        NuOptions {
            term_budget: self.term_budget,
            ..NuOptions::default()
        }
    }
}

/// One row of output in any of the three formats.
pub trait Record {
    const HEADER: &'static [&'static str];
    fn to_json(&self) -> Value;
    fn csv_rows(&self) -> Vec<Vec<String>>;
    fn to_text(&self) -> String;
}

/// Renders records. JSON is always an array; CSV always starts with the
/// header; nothing time-dependent is written.
pub fn emit_report<R: Record>(records: &[R], format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Text => records
            .iter()
            .map(R::to_text)
            .collect::<String>()
            .into_bytes(),
        OutputFormat::Json => {
            let arr = Value::Array(records.iter().map(R::to_json).collect());
            let mut s = serde_json::to_string_pretty(&arr).expect("json values serialize");
            s.push('\n');
            s.into_bytes()
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(R::HEADER).expect("write to memory");
            for rec in records {
                for row in rec.csv_rows() {
                    w.write_record(&row).expect("write to memory");
                }
            }
            w.into_inner().expect("flush to memory")
        }
    }
}

fn ratio_json(r: Ratio<u64>) -> Value {
    json!({ "num": r.numer(), "den": r.denom() })
}

fn witness_json(w: Option<Exponent>) -> Value {
    w.map_or(Value::Null, |k| json!(k))
}

fn witness_text(w: Option<Exponent>) -> String {
    w.map_or_else(
        || "none".to_string(),
        |k| format!("[{},{},{}]", k[0], k[1], k[2]),
    )
}

#[derive(Clone, Debug)]
pub struct NuRow {
    pub a: FieldElement,
    pub classification: FtClass,
    pub record: NuRecord,
}

impl NuRow {
    fn fields(&self) -> Vec<String> {
        let r = &self.record;
        vec![
            self.a.field().p().to_string(),
            self.a.to_string(),
            r.e.to_string(),
            r.nu.to_string(),
            witness_text(r.witness),
            r.ratio().numer().to_string(),
            r.ratio().denom().to_string(),
            self.classification.to_string(),
        ]
    }
}

impl Record for NuRow {
    const HEADER: &'static [&'static str] = &[
        "p",
        "a",
        "e",
        "nu",
        "witness",
        "ratio_num",
        "ratio_den",
        "classification",
    ];

    fn to_json(&self) -> Value {
        let r = &self.record;
        json!({
            "p": self.a.field().p(),
            "a": self.a.to_json(),
            "e": r.e,
            "nu": r.nu,
            "witness": witness_json(r.witness),
            "ratio": ratio_json(r.ratio()),
            "classification": self.classification.to_string(),
        })
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![self.fields()]
    }

    fn to_text(&self) -> String {
        let r = &self.record;
        format!(
            "p={} a={} e={} nu={} ratio={} witness={} classification={}{}\n",
            self.a.field().p(),
            self.a,
            r.e,
            r.nu,
            r.ratio(),
            witness_text(r.witness),
            self.classification,
            if r.saturated { " (saturated)" } else { "" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct FtRow {
    pub a: FieldElement,
    pub result: FtResult,
    /// Set when the closed form was checked against the ν sequence.
    pub cross_checked: bool,
}

impl FtRow {
    fn method(&self) -> String {
        if self.cross_checked {
            "cross-check".into()
        } else {
            self.result.method.to_string()
        }
    }

    fn nu_rows(&self) -> Vec<NuRow> {
        self.result
            .table
            .iter()
            .map(|r| NuRow {
                a: self.a,
                classification: self.result.classification,
                record: r.clone(),
            })
            .collect()
    }
}

impl Record for FtRow {
    const HEADER: &'static [&'static str] = &[
        "p",
        "a",
        "classification",
        "method",
        "ft_num",
        "ft_den",
        "e",
        "nu",
        "ratio_num",
        "ratio_den",
    ];

    fn to_json(&self) -> Value {
        json!({
            "p": self.a.field().p(),
            "a": self.a.to_json(),
            "ft": ratio_json(self.result.ft),
            "ft_is_lower_bound": self.result.is_lower_bound(),
            "upper": self.result.upper.map_or(Value::Null, ratio_json),
            "classification": self.result.classification.to_string(),
            "method": self.method(),
            "table": self.nu_rows().iter().map(NuRow::to_json).collect::<Vec<_>>(),
        })
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let head = vec![
            self.a.field().p().to_string(),
            self.a.to_string(),
            self.result.classification.to_string(),
            self.method(),
            self.result.ft.numer().to_string(),
            self.result.ft.denom().to_string(),
        ];
        if self.result.table.is_empty() {
            let mut row = head;
            row.extend(std::iter::repeat_n(String::new(), 4));
            return vec![row];
        }
        self.result
            .table
            .iter()
            .map(|r| {
                let mut row = head.clone();
                row.extend([
                    r.e.to_string(),
                    r.nu.to_string(),
                    r.ratio().numer().to_string(),
                    r.ratio().denom().to_string(),
                ]);
                row
            })
            .collect()
    }

    fn to_text(&self) -> String {
        let res = &self.result;
        let mut s = format!(
            "p={} a={} classification={}\n",
            self.a.field().p(),
            self.a,
            res.classification
        );
        match res.upper {
            Some(upper) if !self.cross_checked => {
                s += &format!("{} < FT <= {} ({})\n", res.ft, upper, self.method())
            }
            _ => s += &format!("FT = {} ({})\n", res.ft, self.method()),
        }
        if res.table.is_empty() {
            return s;
        }
        let cells: Vec<[String; 5]> = res
            .table
            .iter()
            .map(|r| {
                [
                    r.e.to_string(),
                    r.nu.to_string(),
                    r.p_to_e.to_string(),
                    r.ratio().to_string(),
                    r.upper_ratio().to_string(),
                ]
            })
            .collect();
        let header = ["e", "nu", "p^e", "nu/p^e", "(nu+1)/p^e"];
        let widths: Vec<usize> = (0..5)
            .map(|i| {
                cells
                    .iter()
                    .map(|c| c[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cols: [&str; 5]| {
            let parts: Vec<String> = cols
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            parts.join("  ") + "\n"
        };
        s += &line(header);
        for c in &cells {
            s += &line([&c[0], &c[1], &c[2], &c[3], &c[4]]);
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct ElementRow(pub FieldElement);

impl Record for ElementRow {
    const HEADER: &'static [&'static str] = &["p", "deg", "c0", "c1"];

    fn to_json(&self) -> Value {
        self.0.to_json()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let v = self.0.value();
        vec![vec![
            self.0.field().p().to_string(),
            self.0.field().degree().to_string(),
            v.c0.to_string(),
            v.c1.to_string(),
        ]]
    }

    fn to_text(&self) -> String {
        format!("{}\n", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct DeuringRow {
    pub n: u64,
    pub p: u64,
    pub coeffs: Vec<u64>,
    pub eval: Option<(FieldElement, FieldElement)>,
    pub factors: Option<Vec<LucasFactor>>,
}

impl DeuringRow {
    fn poly_text(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                1 => format!("{c}λ"),
                _ => format!("{c}λ^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    fn factors_text(&self) -> Option<String> {
        self.factors.as_ref().map(|fs| {
            fs.iter()
                .map(|f| format!("H{{{}}}^{}", f.digit, f.exponent))
                .collect::<Vec<_>>()
                .join(" * ")
        })
    }
}

impl Record for DeuringRow {
    const HEADER: &'static [&'static str] =
        &["n", "p", "coeffs", "eval_at", "eval_value", "factors"];

    fn to_json(&self) -> Value {
        let mut v = json!({ "n": self.n, "p": self.p, "coeffs": self.coeffs });
        if let Some((at, value)) = &self.eval {
            v["eval"] = json!({ "at": at.to_json(), "value": value.to_json() });
        }
        if let Some(fs) = &self.factors {
            v["factors"] = fs
                .iter()
                .map(|f| json!({ "digit": f.digit, "exponent": f.exponent }))
                .collect();
        }
        v
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let coeffs: Vec<String> = self.coeffs.iter().map(u64::to_string).collect();
        let (at, value) = self
            .eval
            .as_ref()
            .map_or((String::new(), String::new()), |(a, v)| {
                (a.to_string(), v.to_string())
            });
        vec![vec![
            self.n.to_string(),
            self.p.to_string(),
            coeffs.join(" "),
            at,
            value,
            self.factors_text().unwrap_or_default(),
        ]]
    }

    fn to_text(&self) -> String {
        let mut s = format!("H{{{}}} mod {} = {}\n", self.n, self.p, self.poly_text());
        if let Some((at, value)) = &self.eval {
            s += &format!("H{{{}}}({at}) = {value}\n", self.n);
        }
        if let Some(f) = self.factors_text() {
            s += &format!("H{{{}}} = {f}\n", self.n);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyRow {
    pub suite: &'static str,
    /// `None` for checks over the rationals.
    pub p: Option<u64>,
    pub check: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Record for VerifyRow {
    const HEADER: &'static [&'static str] = &["suite", "p", "check", "pass", "detail"];

    fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "p": self.p,
            "check": self.check,
            "pass": self.pass,
            "detail": self.detail,
        })
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.suite.to_string(),
            self.p.map(|p| p.to_string()).unwrap_or_default(),
            self.check.to_string(),
            self.pass.to_string(),
            self.detail.clone(),
        ]]
    }

    fn to_text(&self) -> String {
        let p = self.p.map_or_else(|| "Q".to_string(), |p| format!("p={p}"));
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:<9} {:<6} {}", self.suite, p, self.check);
        if !self.detail.is_empty() {
            s += ": ";
            s += &self.detail;
        }
        s.push('\n');
        s
    }
}

fn parse_curve(p: u64, a: &str, ext: bool) -> Result<LegendreCurve> {
    let field = if ext {
        FiniteField::quadratic(p)?
    } else {
        FiniteField::prime(p)?
    };
    make_curve(field.parse_element(a)?)
}

fn classification_of(curve: &LegendreCurve) -> Result<FtClass> {
    Ok(fpt::ft_closed_form(curve)?.classification)
}

fn run_nu(cfg: &RunConfig, p: u64, a: &str, ext: bool, e: u32) -> Result<Vec<NuRow>> {
    let curve = parse_curve(p, a, ext)?;
    let record = fpt::nu(&curve, e, &cfg.nu_options())?;
    Ok(vec![NuRow {
        a: *curve.a(),
        classification: classification_of(&curve)?,
        record,
    }])
}

fn run_ft(
    cfg: &RunConfig,
    p: u64,
    a: &str,
    ext: bool,
    emax: u32,
    closed: bool,
    brute: bool,
) -> Result<Vec<FtRow>> {
    let curve = parse_curve(p, a, ext)?;
    let row = if closed {
        FtRow {
            a: *curve.a(),
            result: fpt::ft_closed_form(&curve)?,
            cross_checked: false,
        }
    } else if brute {
        FtRow {
            a: *curve.a(),
            result: fpt::ft_estimate(&curve, emax, &cfg.nu_options())?,
            cross_checked: false,
        }
    } else {
        let report = fpt::cross_check(&curve, emax, &cfg.nu_options())?;
        let mut result = report.closed;
        result.table = report.estimate.table;
        FtRow {
            a: *curve.a(),
            result,
            cross_checked: true,
        }
    };
    Ok(vec![row])
}

fn run_ss_list(p: u64, field: FieldChoice) -> Result<Vec<ElementRow>> {
    let search = match field {
        FieldChoice::P => SearchField::Prime,
        FieldChoice::P2 => SearchField::Quadratic,
    };
    Ok(supersingular_values(p, search, ENUMERATION_CAP)?
        .into_iter()
        .map(ElementRow)
        .collect())
}

fn run_deuring(n: u64, p: u64, eval: Option<&str>, factor: bool) -> Result<Vec<DeuringRow>> {
    let base = FiniteField::prime(p)?;
    let h = deuring_poly(n, &base);
    let coeffs = h.coeffs().iter().map(|c| c.c0).collect();
    let eval = match eval {
        None => None,
        Some(s) => {
            let at = match base.parse_element(s) {
                Ok(x) => x,
                Err(_) => FiniteField::quadratic(p)?.parse_element(s)?,
            };
            Some((at, PolyRing::new(base).eval_element(&h, &at)?))
        }
    };
    let factors = if factor {
        Some(deuring_lucas_factorization(n, p)?)
    } else {
        None
    };
    Ok(vec![DeuringRow {
        n,
        p,
        coeffs,
        eval,
        factors,
    }])
}

fn row(
    suite: &'static str,
    p: Option<u64>,
    check: &'static str,
    outcome: Result<bool>,
    detail: String,
) -> VerifyRow {
    match outcome {
        Ok(pass) => VerifyRow {
            suite,
            p,
            check,
            pass,
            detail,
        },
        Err(e) => VerifyRow {
            suite,
            p,
            check,
            pass: false,
            detail: e.to_string(),
        },
    }
}

/// Identity checks for one odd prime.
pub fn lemma_rows(p: u64) -> Vec<VerifyRow> {
    let s = "lemmas";
    let mut rows = vec![
        row(
            s,
            Some(p),
            "p_minus_one",
            check_p_minus_one(p),
            String::new(),
        ),
        row(s, Some(p), "ode", check_ode(p), String::new()),
    ];
    rows.push(match check_no_repeated_roots(p) {
        Ok(r) => VerifyRow {
            suite: s,
            p: Some(p),
            check: "no_repeated_roots",
            pass: r.all(),
            detail: format!("{r:?}"),
        },
        Err(e) => row(s, Some(p), "no_repeated_roots", Err(e), String::new()),
    });
    rows.push(row(
        s,
        Some(p),
        "shared_roots",
        check_shared_roots(p),
        String::new(),
    ));
    let factorization =
        (0..=500u64).try_for_each(|n| deuring_lucas_factorization(n, p).map(|_| ()));
    rows.push(row(
        s,
        Some(p),
        "lucas_factorization",
        factorization.map(|()| true),
        "n <= 500".into(),
    ));
    let count =
        supersingular_values(p, SearchField::Quadratic, ENUMERATION_CAP).map(|v| v.len() as u64);
    rows.push(match count {
        Ok(c) => VerifyRow {
            suite: s,
            p: Some(p),
            check: "supersingular_count",
            pass: c == (p - 1) / 2,
            detail: format!("{c} values in F_{{p^2}}, expected {}", (p - 1) / 2),
        },
        Err(e) => row(s, Some(p), "supersingular_count", Err(e), String::new()),
    });
    rows
}

fn pascal_row(n_max: u64) -> VerifyRow {
    let bad: Vec<u64> = (1..=n_max)
        .filter(|&n| !check_pascal_connection(n))
        .collect();
    VerifyRow {
        suite: "lemmas",
        p: None,
        check: "pascal_connection",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("1 <= n <= {n_max}")
        } else {
            format!("fails for n in {bad:?}")
        },
    }
}

fn technical_row(p: u64) -> VerifyRow {
    match verify_technical_lemma(p, 10) {
        Ok(r) => VerifyRow {
            suite: "technical",
            p: Some(p),
            check: "critical_coefficient",
            pass: r.passed(),
            detail: if r.passed() {
                format!("{} coefficients, N <= {}", r.checked, r.n_max)
            } else {
                format!("mismatches at (N, n, m) = {:?}", r.mismatches)
            },
        },
        Err(e) => row(
            "technical",
            Some(p),
            "critical_coefficient",
            Err(e),
            String::new(),
        ),
    }
}

/// `cross_check` on every `a ∈ F_{p^2} \ {0, 1}`.
pub fn fpt_row(p: u64, e_max: u32, opts: &NuOptions) -> VerifyRow {
    let field = match FiniteField::quadratic(p) {
        Ok(f) => f,
        Err(e) => return row("fpt", Some(p), "cross_check", Err(e), String::new()),
    };
    let params: Vec<FieldElement> = match field.enumerate(ENUMERATION_CAP) {
        Ok(v) => v
            .into_iter()
            .filter(|a| !a.is_zero() && !a.is_one())
            .collect(),
        Err(e) => return row("fpt", Some(p), "cross_check", Err(e), String::new()),
    };
    let failures: Vec<String> = params
        .par_iter()
        .map(|&a| make_curve(a).and_then(|c| fpt::cross_check(&c, e_max, opts)))
        .filter_map(|r| r.err().map(|e| e.to_string()))
        .collect();
    VerifyRow {
        suite: "fpt",
        p: Some(p),
        check: "cross_check",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} curves, e <= {e_max}", params.len())
        } else {
            failures.join("\n")
        },
    }
}

fn run_verify(
    cfg: &RunConfig,
    p_min: u64,
    p_max: u64,
    suite: Suite,
    emax: u32,
) -> Result<Vec<VerifyRow>> {
    if p_min > p_max {
        return Err(Error::ModulusOutOfRange(p_min));
    }
    let primes: Vec<u64> = (p_min..=p_max).filter(|&p| is_prime(p)).collect();
    let odd: Vec<u64> = primes.iter().copied().filter(|&p| p != 2).collect();
    let mut rows = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        rows.push(pascal_row(60));
        rows.extend(
            odd.par_iter()
                .flat_map_iter(|&p| lemma_rows(p))
                .collect::<Vec<_>>(),
        );
    }
    if matches!(suite, Suite::Technical | Suite::All) {
        rows.extend(
            primes
                .par_iter()
                .map(|&p| technical_row(p))
                .collect::<Vec<_>>(),
        );
    }
    if matches!(suite, Suite::Fpt | Suite::All) {
        let opts = cfg.nu_options();
        for &p in &primes {
            // in characteristic 2 every level is cheap
            let e_max = if p == 2 { emax.max(6) } else { emax };
            rows.push(fpt_row(p, e_max, &opts));
        }
    }
    Ok(rows)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MismatchDetected(_) => 1,
        _ => 2,
    }
}

fn finish<R: Record>(
    records: Result<Vec<R>>,
    cfg: &RunConfig,
    all_pass: impl Fn(&[R]) -> bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    match records {
        Ok(records) => {
            let _ = out.write_all(&emit_report(&records, cfg.output));
            if all_pass(&records) {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `argv` (including the program name), runs the command, writes
/// records to `out` and diagnostics to `err`, and returns the exit code:
/// 0 on success, 1 on a detected mismatch, 2 on a usage or input error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let g = &cli.global;
    let output = if g.json {
        OutputFormat::Json
    } else if g.csv {
        OutputFormat::Csv
    } else {
        OutputFormat::Text
    };
    let cfg = match RunConfig::new(g.term_budget, output, g.threads) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let started = Instant::now();
    let code = match cfg.parallelism {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let (mut o, mut e) = (Vec::new(), Vec::new());
                let code = pool.install(|| dispatch(&cli.command, &cfg, &mut o, &mut e));
                let _ = out.write_all(&o);
                let _ = err.write_all(&e);
                code
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        },
        None => dispatch(&cli.command, &cfg, out, err),
    };
    let _ = writeln!(err, "elapsed: {:.3}s", started.elapsed().as_secs_f64());
    code
}

fn dispatch(command: &Command, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match command {
        Command::Nu { p, a, ext, e } => {
            finish(run_nu(cfg, *p, a, *ext, *e), cfg, |_| true, out, err)
        }
        Command::Ft {
            p,
            a,
            ext,
            emax,
            closed,
            brute,
            both: _,
        } => finish(
            run_ft(cfg, *p, a, *ext, *emax, *closed, *brute),
            cfg,
            |_| true,
            out,
            err,
        ),
        Command::SsList { p, field } => finish(run_ss_list(*p, *field), cfg, |_| true, out, err),
        Command::Deuring { n, p, eval, factor } => finish(
            run_deuring(*n, *p, eval.as_deref(), *factor),
            cfg,
            |_| true,
            out,
            err,
        ),
        Command::Verify {
            p_min,
            p_max,
            suite,
            emax,
        } => finish(
            run_verify(cfg, *p_min, *p_max, *suite, *emax),
            cfg,
            |rows: &[VerifyRow]| rows.iter().all(|r| r.pass),
            out,
            err,
        ),
    }
}
