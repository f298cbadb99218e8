//! Solving `d′u = f` mode by mode, the degree-1 closed-range verdict, and
//! non-smooth solutions built from strongly approximable sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use crate::diophantine::{sup_norm, CertifyConfig, DiophantineRegistry, DiophantineVerdict, WitnessTerm};
use crate::fourier::{check_structure, decay_profile, dprime, project_cluster, DecayConfig, FormError, Mode, SmoothnessProfile, TailFlag, TubeForm};
use crate::koszul::{mode_solve, mode_vector, KoszulError, ModeForm, ModeSolution};
use crate::lattice::{classify, gamma_lattice, Classification, FrequencyLattice, PeriodMatrix};
use crate::scalar::{ComplexExact, ExactScalar, Interval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("form is not d′-closed: first offending mode xi = {xi:?}, kappa = {kappa:?}")]
    NotClosed { xi: Vec<BigInt>, kappa: Vec<BigInt> },
    #[error("cannot solve for a degree-0 right-hand side")]
    DegreeUnderflow,
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<KoszulError> for SolverError {
    fn from(e: KoszulError) -> Self {
        SolverError::Form(FormError::Koszul(e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Solved { u: TubeForm, profile: SmoothnessProfile, warning: Option<String> },
    /// Modes with `z = 0` and a nonzero coefficient.
    Obstructed { witnesses: Vec<(Mode, ModeForm)> },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&TubeForm> {
        match self {
            SolveOutcome::Solved { u, .. } => Some(u),
            SolveOutcome::Obstructed { .. } => None,
        }
    }
}

fn check_closed(a: &PeriodMatrix, f: &TubeForm) -> Result<(), SolverError> {
    if f.degree() == 0 {
        return Err(SolverError::DegreeUnderflow);
    }
    if f.degree() < f.n() {
        let df = dprime(a, f)?;
        let first = df.iter().next().map(|(mode, _)| mode.clone());
        if let Some((xi, kappa)) = first {
            return Err(SolverError::NotClosed { xi, kappa });
        }
    }
    Ok(())
}

fn solve_modes(a: &PeriodMatrix, f: &TubeForm) -> Result<(TubeForm, Vec<(Mode, ModeForm)>), SolverError> {
    let modes: Vec<(&Mode, &ModeForm)> = f.iter().collect();
    let solved: Vec<Result<ModeSolution, KoszulError>> =
        modes.par_iter().map(|((xi, kappa), c)| mode_solve(&mode_vector(a, xi, kappa).z, c)).collect();
    let mut u = TubeForm::new(f.m(), f.n(), f.degree() - 1)
        .with_limit(f.limit())
        .with_two_pi_exp(f.two_pi_exp());
    let mut obstructions = Vec::new();
    for ((mode, c), s) in modes.into_iter().zip(solved) {
        match s? {
            ModeSolution::Solved(um) => u.set(mode.0.clone(), mode.1.clone(), um)?,
            ModeSolution::ZeroSolution => {}
            ModeSolution::Obstructed => obstructions.push((mode.clone(), c.clone())),
        }
    }
    Ok((u, obstructions))
}

/// Solves every mode; lists all `z = 0` obstructions if any.
pub fn formal_solvability(a: &PeriodMatrix, f: &TubeForm) -> Result<SolveOutcome, SolverError> {
    check_structure(a, f)?;
    check_closed(a, f)?;
    let (u, witnesses) = solve_modes(a, f)?;
    if !witnesses.is_empty() {
        return Ok(SolveOutcome::Obstructed { witnesses });
    }
    let profile = decay_profile(&u, DecayConfig::default());
    Ok(SolveOutcome::Solved { u, profile, warning: None })
}

/// Solves the `Γ` cluster and its complement separately and flags a
/// non-decaying solution.
pub fn global_solve(a: &PeriodMatrix, f: &TubeForm) -> Result<SolveOutcome, SolverError> {
    check_structure(a, f)?;
    check_closed(a, f)?;
    let lattice = gamma_lattice(a);
    let (inside, outside) = project_cluster(f, &lattice);
    let (u_in, mut witnesses) = solve_modes(a, &inside)?;
    let (u_out, w_out) = solve_modes(a, &outside)?;
    witnesses.extend(w_out);
    if !witnesses.is_empty() {
        witnesses.sort_by(|x, y| x.0.cmp(&y.0));
        return Ok(SolveOutcome::Obstructed { witnesses });
    }
    let u = u_in.add(&u_out)?;
    let profile = decay_profile(&u, DecayConfig::default());
    let warning = match profile.tail {
        TailFlag::NonDecayingTail { count, floor } => {
            let config = CertifyConfig { radius: 10, ..CertifyConfig::default() };
            let verdict = DiophantineRegistry::default()
                .certify(a, "auto", &config)
                .map_or("undecided", |v| v.kind());
            Some(format!(
                "solution coefficients stay >= {floor} at {count} frequencies; a smooth solution is not expected (diophantine verdict: {verdict})"
            ))
        }
        TailFlag::RapidDecay { .. } => None,
    };
    Ok(SolveOutcome::Solved { u, profile, warning })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedRange {
    Yes,
    No,
    Undecided,
}

impl ClosedRange {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClosedRange::Yes => "yes",
            ClosedRange::No => "no",
            ClosedRange::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolvabilityReport {
    pub gamma: FrequencyLattice,
    pub classification: Classification,
    pub diophantine: DiophantineVerdict,
    pub closed_range: ClosedRange,
    pub agh_note: String,
    pub narrative: Vec<String>,
}

pub fn closed_range_from(verdict: &DiophantineVerdict) -> ClosedRange {
    match verdict {
        DiophantineVerdict::WeaklyNonSA { .. } => ClosedRange::Yes,
        DiophantineVerdict::StronglySA { .. } => ClosedRange::No,
        DiophantineVerdict::Empirical { .. } | DiophantineVerdict::Undecided { .. } => ClosedRange::Undecided,
    }
}

/// Degree-1 closed range from the approximation properties of `A`.
/// `method` names a registered certifier or `"auto"`.
pub fn closed_range_verdict(a: &PeriodMatrix, method: &str, config: &CertifyConfig) -> SolvabilityReport {
    let gamma = gamma_lattice(a);
    let classification = classify(&gamma);
    let diophantine = DiophantineRegistry::default().certify(a, method, config).unwrap_or_else(|| {
        DiophantineVerdict::Undecided { reason: format!("unknown certifier '{method}'") }
    });
    let closed_range = closed_range_from(&diophantine);
    let mut narrative = vec![
        "the Γ cluster is always globally solvable: d′ is conjugate to d_t there".to_string(),
        format!("Γ has rank {} in Z^{}", gamma.rank(), a.m()),
    ];
    match &diophantine {
        DiophantineVerdict::WeaklyNonSA { c, rho, method } => {
            narrative.push(format!(
                "max_l |xi·v_l − eta_l| >= {c}·|xi|^-{rho} off Γ ({}), so d′ has closed range in degree 1",
                method.as_str()
            ));
            narrative.push("closed range in degree 1 makes global solvability equivalent to formal solvability".into());
        }
        DiophantineVerdict::StronglySA { witness } => {
            narrative.push(format!(
                "{} frequencies with bounded |xi|^nu·gap make the period vectors strongly simultaneously approximable",
                witness.len()
            ));
            narrative.push("d′ does not have closed range in degree 1; a closed form with non-decaying solution modes exists".into());
        }
        DiophantineVerdict::Empirical { exponent_fit, max_ratio, samples } => narrative.push(format!(
            "no certificate applies; {samples} samples give exponent fit {exponent_fit:.3} and max ratio {max_ratio:.3}"
        )),
        DiophantineVerdict::Undecided { reason } => narrative.push(format!("undecided: {reason}")),
    }
    let agh_note = match closed_range {
        ClosedRange::Yes => "closed range implies almost global hypoellipticity in degree 1: smooth right-hand sides admit smooth solutions whenever distributional ones exist",
        ClosedRange::No => "without closed range, formally solvable data may lack smooth solutions; almost global hypoellipticity is not implied",
        ClosedRange::Undecided => "almost global hypoellipticity follows from closed range, which is not decided here",
    }
    .to_string();
    SolvabilityReport { gamma, classification, diophantine, closed_range, agh_note, narrative }
}

/// `ξᵀA − η` for a real structure.
fn residual(a: &PeriodMatrix, xi: &[BigInt], eta: &[BigInt]) -> Result<Vec<ExactScalar>, SolverError> {
    a.pair(xi)
        .into_iter()
        .zip(eta)
        .map(|(p, e)| p.re.sub(&ExactScalar::from_int(e.clone())).map_err(|e| SolverError::InvalidWitness(e.to_string())))
        .collect()
}

const WITNESS_PRECISION: u64 = 128;

/// Degree-1 form with one mode per witness term: at `(ξ_ν, −η_ν)` the
/// covector `w_ν = ξ_νᵀA − η_ν`. Then `z = i·w_ν`, so the mode solution
/// is the constant `−i`, whatever the size of `w_ν`.
pub fn counterexample(a: &PeriodMatrix, witness: &[WitnessTerm], terms: usize) -> Result<TubeForm, SolverError> {
    if !a.is_real() {
        return Err(SolverError::InvalidWitness("structure has a nonzero imaginary part".into()));
    }
    if terms > witness.len() {
        return Err(SolverError::InvalidWitness(format!("{terms} terms requested, witness has {}", witness.len())));
    }
    let mut f = TubeForm::unbounded(a.m(), a.n(), 1);
    let mut last_norm: Option<BigInt> = None;
    for t in &witness[..terms] {
        if t.xi.len() != a.m() || t.eta.len() != a.n() {
            return Err(SolverError::InvalidWitness(format!("term {} has the wrong shape", t.nu)));
        }
        let norm = sup_norm(&t.xi);
        if last_norm.as_ref().is_some_and(|p| &norm <= p) {
            return Err(SolverError::InvalidWitness(format!("|xi| does not increase at term {}", t.nu)));
        }
        let w = residual(a, &t.xi, &t.eta)?;
        if w.iter().all(|x| x.is_zero()) {
            return Err(SolverError::InvalidWitness(format!("term {} lies in Γ", t.nu)));
        }
        let gap = w.iter().fold(Interval::zero(), |g, x| g.max(&x.enclose_bits(WITNESS_PRECISION).abs()));
        let scaled = gap.scale(&BigRational::from_integer(norm.pow(t.nu)));
        if scaled.lo() > t.bound.hi() {
            return Err(SolverError::InvalidWitness(format!(
                "term {}: |xi|^nu·gap >= {} exceeds the claimed bound {}",
                t.nu,
                scaled.lo(),
                t.bound.hi()
            )));
        }
        let kappa: Vec<BigInt> = t.eta.iter().map(|e| -e).collect();
        let coeffs: Vec<ComplexExact> = w.into_iter().map(ComplexExact::real).collect();
        f.set(t.xi.clone(), kappa, ModeForm::covector(&coeffs))?;
        last_norm = Some(norm);
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateEntry {
    pub xi: Vec<BigInt>,
    pub kappa: Vec<BigInt>,
    /// Enclosure of `|f_mode|²`.
    pub f_norm_sq: Interval,
    pub u: ModeForm,
    /// Exact `|u_mode|²`.
    pub u_norm_sq: ExactScalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleCertificate {
    pub entries: Vec<CertificateEntry>,
    pub f_profile: SmoothnessProfile,
    pub u_profile: SmoothnessProfile,
}

/// Solves the counterexample and records every mode of the solution.
pub fn certify_counterexample(a: &PeriodMatrix, f: &TubeForm) -> Result<CounterexampleCertificate, SolverError> {
    let outcome = formal_solvability(a, f)?;
    let SolveOutcome::Solved { u, profile, .. } = outcome else {
        return Err(SolverError::InvalidWitness("counterexample has a z = 0 mode".into()));
    };
    let mut entries = Vec::new();
    for ((xi, kappa), c) in f.iter() {
        let um = u.get(xi, kappa).cloned().unwrap_or_else(|| ModeForm::zero(f.n(), 0));
        entries.push(CertificateEntry {
            xi: xi.clone(),
            kappa: kappa.clone(),
            f_norm_sq: c.norm_sq_enclosure(WITNESS_PRECISION),
            u_norm_sq: um.norm_sq().map_err(KoszulError::from)?,
            u: um,
        });
    }
    entries.sort_by(|x, y| sup_norm(&x.xi).cmp(&sup_norm(&y.xi)));
    Ok(CounterexampleCertificate { entries, f_profile: decay_profile(f, DecayConfig::default()), u_profile: profile })
}

/// `|u|·|z| <= |f|` for one mode, unless the enclosures refute it.
pub fn norm_bound_holds(z: &[ComplexExact], f: &ModeForm, u: &ModeForm) -> bool {
    let z_sq = ModeForm::covector(z).norm_sq_enclosure(WITNESS_PRECISION);
    let lhs = u.norm_sq_enclosure(WITNESS_PRECISION).mul(&z_sq);
    let rhs = f.norm_sq_enclosure(WITNESS_PRECISION);
    lhs.lo() <= rhs.hi() && !lhs.hi().is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::liouville_witness;
    use crate::fourier::random_closed_form;
    use crate::koszul::{big, MultiIndex};

    fn idx(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn solves_exact_forms() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (1, 3)]]);
        let f = random_closed_form(3, &a, 1, 4, false);
        let SolveOutcome::Solved { u, .. } = global_solve(&a, &f).unwrap() else { panic!() };
        assert_eq!(dprime(&a, &u).unwrap(), f);
        let zero = TubeForm::new(1, 2, 1);
        assert!(matches!(formal_solvability(&a, &zero).unwrap(), SolveOutcome::Solved { u, .. } if u.is_zero()));
    }

    #[test]
    fn obstruction_at_zero_mode() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)]]);
        let mut f = TubeForm::new(1, 2, 1);
        f.set(big(&[2]), big(&[-1, 0]), ModeForm::single(2, idx(&[0]), ComplexExact::one())).unwrap();
        let SolveOutcome::Obstructed { witnesses } = formal_solvability(&a, &f).unwrap() else { panic!() };
        assert_eq!(witnesses.len(), 1);
        assert_eq!(witnesses[0].0, (big(&[2]), big(&[-1, 0])));
    }

    #[test]
    fn not_closed_is_reported() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)]]);
        let mut f = TubeForm::new(1, 2, 1);
        f.set(big(&[1]), big(&[0, 0]), ModeForm::single(2, idx(&[1]), ComplexExact::one())).unwrap();
        assert!(matches!(formal_solvability(&a, &f), Err(SolverError::NotClosed { .. })));
    }

    #[test]
    fn verdict_examples() {
        let cfg = CertifyConfig::default();
        let r = closed_range_verdict(&PeriodMatrix::rational(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 3)]]), "auto", &cfg);
        assert_eq!(r.closed_range, ClosedRange::Yes);
        let (liou, _) = liouville_witness(10, 1, 3).unwrap();
        assert_eq!(closed_range_verdict(&liou, "auto", &cfg).closed_range, ClosedRange::No);
        let root2 = PeriodMatrix::real(vec![vec![ExactScalar::sqrt(2).unwrap()]]).unwrap();
        assert_eq!(closed_range_verdict(&root2, "auto", &cfg).closed_range, ClosedRange::Yes);
    }

    #[test]
    fn liouville_counterexample_has_unit_solutions() {
        let (a, w) = liouville_witness(10, 1, 4).unwrap();
        let f = counterexample(&a, &w, 3).unwrap();
        assert_eq!(f.support_len(), 3);
        let cert = certify_counterexample(&a, &f).unwrap();
        for e in &cert.entries {
            assert_eq!(e.u_norm_sq, ExactScalar::one());
            assert_eq!(e.u.get(&MultiIndex::empty()), ComplexExact::new(ExactScalar::zero(), ExactScalar::from_int(-1)));
        }
        assert!(counterexample(&a, &w, 0).unwrap().is_zero());
    }

    #[test]
    fn fabricated_witness_is_rejected() {
        let a = PeriodMatrix::rational(&[&[(1, 3)]]);
        let fake: Vec<WitnessTerm> = (1..=4u32)
            .map(|nu| {
                let xi = BigInt::from(3i64.pow(nu) + 1);
                let eta = (&xi + 1) / 3;
                let bound = Interval::point(BigRational::from_integer(2.into()));
                WitnessTerm { nu, xi: vec![xi], eta: vec![eta], gap: bound.clone(), bound }
            })
            .collect();
        assert!(matches!(counterexample(&a, &fake, 4), Err(SolverError::InvalidWitness(_))));
    }
}
