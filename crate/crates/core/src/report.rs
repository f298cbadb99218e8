//! Machine-readable reports.
//!
//! Every builder returns a `serde_json::Value` whose object keys are sorted,
//! so the rendered text depends only on the inputs. Exact quantities are
//! strings; interval enclosures carry outward-rounded decimal endpoints and
//! a width.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::diophantine::{DiophantineVerdict, WitnessTerm};
use crate::fourier::{SmoothnessProfile, TailFlag, TubeForm};
use crate::isomorphisms::{CohomologyDimension, IsomorphismReport};
use crate::koszul::ModeForm;
use crate::lattice::{classify, Completeness, FrequencyLattice};
use crate::scalar::{ComplexExact, Interval};
use crate::solver::{CounterexampleCertificate, SolvabilityReport, SolveOutcome};
use crate::surfaces::{finiteness_classifier, mode_dims, DmFailureSummary, SurfaceProfile, Tristate};

/// Significant digits in decimal renderings.
const DIGITS: u32 = 12;
/// Exact rational endpoints are included when no longer than this.
const EXACT_LIMIT: usize = 80;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

/// Scientific notation with `DIGITS` significant digits, rounded toward
/// `-inf` or `+inf`.
fn decimal(x: &BigRational, round: Round) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let negative = x.is_negative();
    // rounding |x| down is rounding x up when x < 0
    let toward_zero = (round == Round::Down) != negative;
    let num = x.numer().abs();
    let den = x.denom().clone();
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ten = BigInt::from(10);
    let pow = |k: i64| num_traits::pow(ten.clone(), k as usize);
    // normalize so that 10^e <= |x| < 10^(e+1)
    loop {
        let (lhs, rhs) = if e >= 0 { (num.clone(), &den * pow(e)) } else { (&num * pow(-e), den.clone()) };
        if lhs < rhs {
            e -= 1;
        } else if lhs >= &rhs * &ten {
            e += 1;
        } else {
            break;
        }
    }
    let shift = DIGITS as i64 - 1 - e;
    let (p, q) = if shift >= 0 { (&num * pow(shift), den.clone()) } else { (num.clone(), &den * pow(-shift)) };
    let (mut mantissa, rem) = (&p / &q, &p % &q);
    if !toward_zero && !rem.is_zero() {
        mantissa += 1;
    }
    if mantissa >= pow(DIGITS as i64) {
        mantissa /= &ten;
        e += 1;
    }
    let digits = mantissa.to_string();
    let (head, tail) = digits.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

pub fn interval(iv: &Interval) -> Value {
    let mut obj = json!({
        "lo": decimal(iv.lo(), Round::Down),
        "hi": decimal(iv.hi(), Round::Up),
        "width": decimal(&iv.width(), Round::Up),
    });
    let lo = iv.lo().to_string();
    let hi = iv.hi().to_string();
    if lo.len() <= EXACT_LIMIT && hi.len() <= EXACT_LIMIT {
        obj["exact"] = json!([lo, hi]);
    }
    obj
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn complex(c: &ComplexExact) -> Value {
    json!({"re": c.re.to_string(), "im": c.im.to_string()})
}

pub fn mode_form(c: &ModeForm) -> Value {
    let map: serde_json::Map<String, Value> = c.iter().map(|(j, v)| (j.to_string(), complex(v))).collect();
    Value::Object(map)
}

fn anchors(items: &[&str]) -> Value {
    json!(items)
}

pub fn lattice(gamma: &FrequencyLattice) -> Value {
    let class = classify(gamma);
    json!({
        "gamma_rank": gamma.rank(),
        "gamma_basis": gamma.basis_strings(),
        "gamma_index": gamma.index().map(|d| d.to_string()),
        "classification": class.class,
        "completeness": completeness(&class.completeness),
    })
}

fn completeness(c: &Completeness) -> Value {
    match c {
        Completeness::Exact => json!("exact"),
        Completeness::BoxCertified(r) => json!(format!("box_certified({r})")),
    }
}

fn witness_term(w: &WitnessTerm) -> Value {
    json!({
        "nu": w.nu,
        "xi": ints(&w.xi),
        "eta": ints(&w.eta),
        "gap": interval(&w.gap),
        "bound": interval(&w.bound),
    })
}

pub fn verdict(v: &DiophantineVerdict) -> Value {
    let mut obj = json!({
        "verdict": v.kind(),
        "C": null,
        "rho": null,
        "method": null,
        "witness": [],
        "exponent_fit": null,
        "max_ratio": null,
        "samples": null,
        "reason": null,
    });
    match v {
        DiophantineVerdict::WeaklyNonSA { c, rho, method } => {
            obj["C"] = json!(c.to_string());
            obj["rho"] = json!(rho.to_string());
            obj["method"] = json!(method.as_str());
        }
        DiophantineVerdict::StronglySA { witness } => {
            obj["method"] = json!("liouville_witness");
            obj["witness"] = Value::Array(witness.iter().map(witness_term).collect());
        }
        DiophantineVerdict::Empirical { exponent_fit, max_ratio, samples } => {
            obj["method"] = json!("empirical");
            obj["exponent_fit"] = json!(exponent_fit);
            obj["max_ratio"] = json!(max_ratio);
            obj["samples"] = json!(samples);
        }
        DiophantineVerdict::Undecided { reason } => obj["reason"] = json!(reason),
    }
    obj
}

pub fn diophantine_report(v: &DiophantineVerdict) -> Value {
    let mut obj = verdict(v);
    obj["anchors"] = anchors(&[
        "gap(xi) = max_l |xi·v_l − eta_l| over the nearest integers eta_l",
        "weakly non-approximable: gap(xi) >= C|xi|^-rho for xi outside Γ",
        "strongly approximable: |xi|^nu·gap(xi) stays bounded along a sequence, for every nu",
    ]);
    obj
}

pub fn solvability(r: &SolvabilityReport) -> Value {
    let mut obj = lattice(&r.gamma);
    obj["diophantine"] = verdict(&r.diophantine);
    obj["verdict"] = json!(r.diophantine.kind());
    obj["closed_range"] = json!(r.closed_range.as_str());
    obj["agh_note"] = json!(r.agh_note);
    obj["narrative"] = json!(r.narrative);
    obj["anchors"] = anchors(&[
        "Γ = {xi : xiᵀ Re A in Z^n, xiᵀ Im A = 0}",
        "degree-1 closed range iff the period vectors are weakly non-simultaneously approximable",
        "on the Γ cluster the frequency shear conjugates d′ to d_t",
    ]);
    obj
}

pub fn profile(p: &SmoothnessProfile) -> Value {
    let samples: Vec<Value> = p
        .samples
        .iter()
        .map(|s| json!({"magnitude": s.magnitude.to_string(), "norm_sq": interval(&s.norm_sq)}))
        .collect();
    let tail = match &p.tail {
        TailFlag::RapidDecay { s_max } => json!({"flag": "rapid_decay", "s_max": s_max}),
        TailFlag::NonDecayingTail { count, floor } => {
            json!({"flag": "non_decaying_tail", "count": count, "floor": floor})
        }
    };
    json!({"samples": samples, "tail": tail})
}

pub fn solve_outcome(o: &SolveOutcome) -> Value {
    let mut obj = match o {
        SolveOutcome::Solved { u, profile: p, warning } => json!({
            "outcome": "solved",
            "support": u.support_len(),
            "degree": u.degree(),
            "profile": profile(p),
            "warning": warning,
        }),
        SolveOutcome::Obstructed { witnesses } => {
            let list: Vec<Value> = witnesses
                .iter()
                .map(|((xi, kappa), c)| json!({"xi": ints(xi), "kappa": ints(kappa), "coefficient": mode_form(c)}))
                .collect();
            json!({"outcome": "obstructed", "witnesses": list})
        }
    };
    obj["anchors"] = anchors(&[
        "mode (xi, kappa) solves with the Koszul homotopy u = contract(conj z, f)/|z|^2",
        "f is formally solvable iff every mode with z = 0 vanishes",
    ]);
    obj
}

pub fn certificate(c: &CounterexampleCertificate) -> Value {
    let entries: Vec<Value> = c
        .entries
        .iter()
        .map(|e| {
            json!({
                "xi": ints(&e.xi),
                "kappa": ints(&e.kappa),
                "f_norm_sq": interval(&e.f_norm_sq),
                "u": mode_form(&e.u),
                "u_norm_sq": e.u_norm_sq.to_string(),
                "u_unit_modulus": e.u_norm_sq.as_rational().is_some_and(|r| r.is_one()),
            })
        })
        .collect();
    json!({
        "entries": entries,
        "f_profile": profile(&c.f_profile),
        "u_profile": profile(&c.u_profile),
        "anchors": [
            "f has rapidly decaying modes placed where the approximation gap is tiny",
            "every mode of the formal solution has modulus 1, so no smooth solution exists",
        ],
    })
}

pub fn form_summary(f: &TubeForm) -> Value {
    json!({"m": f.m(), "n": f.n(), "q": f.degree(), "support": f.support_len(), "two_pi_exp": f.two_pi_exp()})
}

fn dimension(d: &CohomologyDimension) -> Value {
    match d {
        CohomologyDimension::Zero => json!({"kind": "zero"}),
        CohomologyDimension::Finite(k) => json!({"kind": "finite", "dim": k}),
        CohomologyDimension::Infinite => json!({"kind": "infinite"}),
        CohomologyDimension::ConditionalOnClosedRange(k) => json!({"kind": "conditional_on_closed_range", "dim": k}),
    }
}

pub fn isomorphism(r: &IsomorphismReport) -> Value {
    let failures: Vec<Value> =
        r.vanishing_failures.iter().map(|(xi, kappa)| json!({"xi": ints(xi), "kappa": ints(kappa)})).collect();
    json!({
        "m": r.m,
        "n": r.n,
        "q": r.q,
        "gamma_rank": r.gamma_rank,
        "gamma_class": r.gamma_class,
        "box": r.box_radius,
        "frequencies_checked": r.frequencies_checked,
        "vanishing_holds": r.vanishing_holds(),
        "vanishing_failures": failures,
        "de_rham_dim": r.de_rham_dim,
        "shape": r.shape(),
        "degree1_closed_range": r.degree1_closed_range.as_str(),
        "dimension": dimension(&r.dimension),
        "notes": r.notes,
        "anchors": [
            "outside Γ the mode vector z(xi, kappa) never vanishes, so those frequencies carry no cohomology",
            "H^q is C^inf(T^r) tensored with H^q_dR(T^n), r the rank of Γ",
        ],
    })
}

fn tristate(t: Tristate) -> &'static str {
    match t {
        Tristate::Yes => "yes",
        Tristate::No => "no",
        Tristate::Unknown => "unknown",
    }
}

pub fn surface(p: &SurfaceProfile) -> Value {
    let verdicts = finiteness_classifier(p);
    let (i0, i1, i2) = mode_dims(p.genus, true);
    let (o0, o1, o2) = mode_dims(p.genus, false);
    let (inside, outside) = ([i0, i1, i2], [o0, o1, o2]);
    let table: Vec<Value> = (0..3)
        .map(|q| {
            json!({
                "q": q,
                "in_gamma_dim": inside[q],
                "off_gamma_dim": outside[q],
                "verdict": verdicts[q].as_str(),
            })
        })
        .collect();
    json!({
        "genus": p.genus,
        "gamma": p.gamma_class,
        "closed_range": tristate(p.degree1_closed_range),
        "euler_characteristic": crate::surfaces::euler_characteristic(p.genus),
        "euler_index_check": crate::surfaces::euler_index_check(p.genus),
        "table": table,
        "anchors": [
            "in Γ the mode complex is de Rham: (1, 2g, 1)",
            "outside Γ the twisted complex has (0, 2g − 2, 0), index 2 − 2g",
        ],
    })
}

pub fn failure_summary(s: &DmFailureSummary) -> Value {
    json!({
        "genus": s.genus,
        "lambda_class": format!("{:?}", s.lambda_class),
        "gamma": s.gamma_class,
        "closed_range": tristate(s.closed_range),
        "h1": s.h1.as_str(),
        "de_rham_iso_holds": s.de_rham_iso_holds,
        "conclusion": s.conclusion,
    })
}

/// Pretty-printed JSON followed by a newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn decimal_rounds_outward() {
        assert_eq!(decimal(&r(1, 3), Round::Down), "3.33333333333e-1");
        assert_eq!(decimal(&r(1, 3), Round::Up), "3.33333333334e-1");
        assert_eq!(decimal(&r(-1, 3), Round::Down), "-3.33333333334e-1");
        assert_eq!(decimal(&r(100, 1), Round::Up), "1e2");
        assert_eq!(decimal(&r(999_999_999_999_9, 10_000_000_000_000), Round::Up), "1e0");
        let tiny = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 720));
        assert_eq!(decimal(&tiny, Round::Down), "1e-720");
    }

    #[test]
    fn interval_fields() {
        let v = interval(&Interval::new(r(1, 4), r(1, 2)));
        assert_eq!(v["exact"], json!(["1/4", "1/2"]));
        assert_eq!(v["width"], json!("2.5e-1"));
    }
}
