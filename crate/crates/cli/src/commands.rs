use std::fmt::Write as _;
use std::fs;

use serde::Serialize;
use widthcalc::closedform::{classify, RegimeReport};
use widthcalc::exponent::{analyze, ExponentResult};
use widthcalc::finitedim::{intersection_order, BallSpec, CertificateKind, IntersectionSpec, Magnitude, WidthOrder};
use widthcalc::format::{both, ExactValue};
use widthcalc::oracle::{run_verification, VerificationReport};
use widthcalc::params::{parse_rational, parse_rational_list, NormIndex};
use widthcalc::{ProblemSpec, Rational};

use crate::args::{FiniteArgs, Format, SpecArgs, VerifyArgs};
use crate::error::{CliError, EXIT_NONCOMPACT, EXIT_OK, EXIT_UNCERTIFIED, EXIT_VERIFY};

/// What a command prints, and the exit code it ends with.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

pub fn parse_spec(a: &SpecArgs) -> Result<ProblemSpec, CliError> {
    let p = parse_rational_list(required(&a.p, "p")?)?;
    let r = parse_rational_list(required(&a.r, "r")?)?;
    let q = parse_rational(required(&a.q, "q")?)?;
    if let Some(d) = a.d {
        if d != p.len() || d != r.len() {
            return Err(CliError::Usage(format!("--d {d} does not match {} values of p and {} of r", p.len(), r.len())));
        }
    }
    Ok(ProblemSpec::new(p, r, q)?)
}

#[derive(Debug, Serialize)]
pub struct SpecEcho {
    pub p: Vec<ExactValue>,
    pub r: Vec<ExactValue>,
    pub q: ExactValue,
}

impl SpecEcho {
    pub fn of(spec: &ProblemSpec) -> Self {
        let ev = |v: &[Rational]| v.iter().cloned().map(ExactValue).collect();
        SpecEcho { p: ev(spec.p()), r: ev(spec.r()), q: ExactValue(spec.q().clone()) }
    }
}

#[derive(Debug, Serialize)]
pub struct ExponentOutput {
    pub command: &'static str,
    pub input: SpecEcho,
    pub exponent: ExponentResult,
    pub regime: RegimeReport,
    /// `None` when no explicit formula applies.
    pub closed_form_agrees: Option<bool>,
    pub warnings: Vec<String>,
    pub status: &'static str,
    pub exit_code: i32,
}

/// Status and exit code of an exponent query, most serious condition first.
pub fn exponent_status(regime: &RegimeReport, lp: &ExponentResult) -> (&'static str, i32, Vec<String>) {
    let mut warnings = regime.notes.clone();
    if !regime.compact {
        warnings.push(format!("not compactly embedded ({}); the minimum is not a width exponent", regime.theorem_case));
        return ("not-compact", EXIT_NONCOMPACT, warnings);
    }
    if regime.exponent.as_ref().is_some_and(|e| *e != lp.theta) {
        warnings.push("explicit formula and minimisation disagree".into());
        return ("mismatch", EXIT_VERIFY, warnings);
    }
    if !lp.unique {
        warnings.push("the minimiser is not unique, so the order estimate is not certified and may lose a logarithmic factor".into());
        return ("non-unique", EXIT_UNCERTIFIED, warnings);
    }
    if regime.tie {
        warnings.push("tie between explicit candidates: order not certified".into());
        return ("tie", EXIT_UNCERTIFIED, warnings);
    }
    if regime.exponent.is_none() {
        warnings.push("no explicit formula applies; the exponent rests on the minimisation alone".into());
    }
    ("ok", EXIT_OK, warnings)
}

pub fn exponent(a: &SpecArgs, format: Format) -> Result<Outcome, CliError> {
    let spec = parse_spec(a)?;
    let regime = classify(&spec);
    let lp = analyze(&spec)?;
    let (status, code, warnings) = exponent_status(&regime, &lp);
    let out = ExponentOutput {
        command: "exponent",
        input: SpecEcho::of(&spec),
        closed_form_agrees: regime.exponent.as_ref().map(|e| *e == lp.theta),
        exponent: lp,
        regime,
        warnings,
        status,
        exit_code: code,
    };
    let text = match format {
        Format::Json => json(&out)?,
        Format::Text => {
            let mut s = String::new();
            let lp = &out.exponent;
            let _ = writeln!(s, "input: {spec}");
            let _ = writeln!(s, "theta: {}", both(&lp.theta));
            let _ = writeln!(s, "argmin: {}", lp.argmin);
            let _ = writeln!(s, "unique: {}", lp.unique);
            let active: Vec<String> = lp.active_pieces.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "active pieces: {}", active.join(" "));
            let _ = writeln!(s, "regime: {}", out.regime.theorem_case);
            match &out.regime.exponent {
                Some(e) if *e == lp.theta => {
                    let _ = writeln!(s, "closed form: {} (agrees)", both(e));
                }
                Some(e) => {
                    let _ = writeln!(s, "closed form: {} (DISAGREES)", both(e));
                }
                None => {
                    let _ = writeln!(s, "closed form: none");
                }
            }
            let _ = writeln!(s, "compact: {}", out.regime.compact);
            write_tail(&mut s, &out.warnings, status);
            s
        }
    };
    Ok(Outcome { text, code })
}

#[derive(Debug, Serialize)]
pub struct RegimeOutput {
    pub command: &'static str,
    pub input: SpecEcho,
    pub regime: RegimeReport,
    pub warnings: Vec<String>,
    pub status: &'static str,
    pub exit_code: i32,
}

pub fn regime(a: &SpecArgs, format: Format) -> Result<Outcome, CliError> {
    let spec = parse_spec(a)?;
    let regime = classify(&spec);
    let mut warnings = regime.notes.clone();
    let (status, code) = if !regime.compact {
        warnings.push("not compactly embedded".into());
        ("not-compact", EXIT_NONCOMPACT)
    } else if regime.tie {
        ("tie", EXIT_UNCERTIFIED)
    } else if regime.exponent.is_none() {
        warnings.push("no explicit formula applies; run `exponent` for the minimisation".into());
        ("uncovered", EXIT_UNCERTIFIED)
    } else {
        ("ok", EXIT_OK)
    };
    let out = RegimeOutput { command: "regime", input: SpecEcho::of(&spec), regime, warnings, status, exit_code: code };
    let text = match format {
        Format::Json => json(&out)?,
        Format::Text => {
            let r = &out.regime;
            let mut s = String::new();
            let _ = writeln!(s, "input: {spec}");
            let _ = writeln!(s, "regime: {}", r.theorem_case);
            let _ = writeln!(s, "bounded: {}", r.bounded);
            let _ = writeln!(s, "compact: {}", r.compact);
            let _ = writeln!(s, "sum condition: {}", if r.dop_usl_holds { "holds" } else { "fails" });
            for t in &r.thetas {
                let _ = writeln!(s, "{}: {}", t.name, both(&t.value));
            }
            match &r.exponent {
                Some(e) => {
                    let _ = writeln!(s, "exponent: {}", both(e));
                }
                None => {
                    let _ = writeln!(s, "exponent: none");
                }
            }
            write_tail(&mut s, &out.warnings, status);
            s
        }
    };
    Ok(Outcome { text, code })
}

#[derive(Debug, Serialize)]
pub struct FiniteEcho {
    #[serde(rename = "N")]
    pub big_n: u64,
    pub n: u64,
    pub q: String,
    pub balls: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FiniteOutput {
    pub command: &'static str,
    pub input: FiniteEcho,
    pub order: WidthOrder,
    pub warnings: Vec<String>,
    pub status: &'static str,
    pub exit_code: i32,
}

pub fn parse_intersection(a: &FiniteArgs) -> Result<IntersectionSpec, CliError> {
    let big_n = a.big_n.ok_or_else(|| CliError::Usage("missing --N".into()))?;
    let n = a.n.ok_or_else(|| CliError::Usage("missing --n".into()))?;
    let q: NormIndex = required(&a.q, "q")?.parse()?;
    let balls = required(&a.balls, "balls")?.split(',').map(BallSpec::parse).collect::<Result<Vec<_>, _>>()?;
    Ok(IntersectionSpec::new(big_n, n, q, balls)?)
}

fn mag(m: &Magnitude) -> String {
    format!("{} ({})", m, m.decimal())
}

pub fn finite(a: &FiniteArgs, format: Format) -> Result<Outcome, CliError> {
    let spec = parse_intersection(a)?;
    let order = intersection_order(&spec)?;
    let mut warnings = Vec::new();
    let (status, code) = match &order.certificate {
        Some(c) if !c.certificate.all_hold() => {
            warnings.push(format!("certificate for {} fails a check", c.label()));
            ("certificate-failed", EXIT_VERIFY)
        }
        _ => ("ok", EXIT_OK),
    };
    if order.certificate.is_none() && spec.balls.len() > 1 {
        warnings.push("no explicit case applies; the value is the upper bound formula, without a lower-bound certificate".into());
    }
    let echo = FiniteEcho {
        big_n: spec.big_n,
        n: spec.n,
        q: spec.q.to_string(),
        balls: spec.balls.iter().map(|b| format!("{}:{}", b.p, b.nu)).collect(),
    };
    let out = FiniteOutput { command: "finite", input: echo, order, warnings, status, exit_code: code };
    let text = match format {
        Format::Json => json(&out)?,
        Format::Text => {
            let o = &out.order;
            let mut s = String::new();
            let _ = writeln!(s, "input: N={} n={} q={} balls={}", out.input.big_n, out.input.n, out.input.q, out.input.balls.join(","));
            let _ = writeln!(s, "value: {}", mag(&o.value));
            let _ = writeln!(s, "kind: {}", if o.exact { "exact width" } else { "order, up to constants" });
            let _ = writeln!(s, "branch: {}", o.branch.label());
            let _ = writeln!(s, "terms:");
            for t in &o.terms {
                let _ = writeln!(s, "  {:<14} {}", t.label(), mag(&t.value));
            }
            if let Some(c) = &o.certificate {
                let cert = &c.certificate;
                let held = cert.checked.iter().filter(|x| x.recheck()).count();
                let _ = writeln!(
                    s,
                    "certificate: {} via {} inclusion, k = {}, {held}/{} inequalities hold",
                    c.label(),
                    match cert.kind {
                        CertificateKind::B1Inclusion => "B_1",
                        CertificateKind::BinfInclusion => "B_inf",
                        CertificateKind::VkInclusion => "V_k",
                    },
                    cert.k,
                    cert.checked.len()
                );
                let _ = writeln!(s, "  lower bound: {} = {}", cert.expression, mag(&cert.lower_bound));
                let _ = writeln!(s, "  certified:   {}", mag(&cert.certified_value));
                if !c.overlaps.is_empty() {
                    let _ = writeln!(s, "  also applies: {}", c.overlaps.join(", "));
                }
            }
            write_tail(&mut s, &out.warnings, status);
            s
        }
    };
    Ok(Outcome { text, code })
}

pub fn verify(a: &VerifyArgs, format: Format) -> Result<Outcome, CliError> {
    let report: VerificationReport = run_verification(a.samples, a.seed, a.inject_fault.map(Into::into));
    let code = if report.passed() { EXIT_OK } else { EXIT_VERIFY };
    let text = match format {
        Format::Json => json(&report)?,
        Format::Text => format!("{report}\n"),
    };
    if let Some(path) = &a.report {
        fs::write(path, &text)?;
    }
    Ok(Outcome { text, code })
}

fn write_tail(s: &mut String, warnings: &[String], status: &str) {
    for w in warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s, "status: {status}");
}

pub fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}
